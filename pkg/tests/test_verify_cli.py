import json

import jsonschema
import pytest

from frobmult import verify_cli as vc
from frobmult.paperdata import assets_hash


def test_registry_matches_manifest():
    exps = vc.load_expectations()
    assert set(exps) == set(vc.CHECKS)
    assert {e.provenance for e in exps.values()} <= {"paper", "trivial", "derived"}
    assert {e.criterion for e in exps.values()} == set(range(1, 11))


def test_run_check_examples():
    r = vc.run_check("chi-N-AmodP")
    assert (r.expected, r.computed, r.status) == (-2, -2, "pass")
    assert vc.run_check("length-RmodI").status == "pass"


def test_unknown_check():
    with pytest.raises(KeyError):
        vc.run_check("no-such-check")


def test_fast_suite_passes():
    reports, code = vc.run_suite("fast")
    assert code == 0 and reports
    assert all(r.status == "pass" for r in reports)


def test_empty_selection_exits_zero(caplog):
    reports, code = vc.run_suite("nonexistent-*")
    assert reports == [] and code == 0
    assert "no checks match" in caplog.text


def test_selectors():
    assert vc.select("criterion-6") == ["length-RmodI", "socle-RmodI", "socle-generator-ze",
                                        "regular-sequence-I", "krull-dim-R"]
    assert "rank-alpha1" in vc.select("derived")
    assert vc.select("rank-*") == ["rank-alpha", "rank-beta", "rank-sum", "rank-alpha1", "rank-beta1"]
    assert vc.select("criterion-x") == []
    all_ = vc.select("all")
    assert len(all_) == len(vc.load_expectations())


def test_R_level_checks_refuse_odd_primes():
    r = vc.run_check("length-RmodI", vc.RunConfig(prime=3))
    assert r.status == "skipped" and "characteristic 2" in r.message
    # A-level checks run at other primes
    assert vc.run_check("rank-alpha", vc.RunConfig(prime=3)).status == "pass"


def test_resource_cap_is_reported_not_failed():
    r = vc.run_check("length-M-groebner", vc.RunConfig(max_degree=4))
    assert r.status == "resource-capped"
    assert vc.exit_status([r]) == 0
    assert vc.exit_status([r], strict=True) == 1


def test_optional_checks_need_opt_in():
    r = vc.run_check("frobenius-M-n2")
    assert r.status == "skipped" and "--frobenius-steps 2" in r.message
    ctx = vc.Context(vc.RunConfig())
    assert vc.run_check("acyclicity-M-groebner", ctx=ctx, explicit=False).status == "skipped"


def test_status_requires_exact_type_match(monkeypatch):
    monkeypatch.setitem(vc.CHECKS, "length-N", lambda ctx: 55.0)
    assert vc.run_check("length-N").status == "fail"
    monkeypatch.setitem(vc.CHECKS, "length-N", lambda ctx: 1 / 0)
    r = vc.run_check("length-N")
    assert r.status == "fail" and "ZeroDivisionError" in r.message


def test_bad_config_is_a_usage_error():
    with pytest.raises(ValueError):
        vc.RunConfig(prime=4)
    with pytest.raises(vc.UsageError):
        vc.RunConfig(frobenius_steps=-1)


def test_json_report_validates(tmp_path):
    reports, _ = vc.run_suite("criterion-1")
    doc = vc.report_json(reports, vc.RunConfig(), "criterion-1")
    jsonschema.validate(doc, vc.report_schema())
    assert doc["assets_hash"] == assets_hash()
    assert [r["check"] for r in doc["derived_checks"]] == ["rank-alpha1", "rank-beta1"]
    assert all(r["provenance"] != "derived" for r in doc["checks"])


def test_reports_are_deterministic():
    a, _ = vc.run_suite("fast")
    b, _ = vc.run_suite("fast")
    assert [(r.check, r.computed, r.status) for r in a] == [(r.check, r.computed, r.status) for r in b]


def test_cli_verify_and_json(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert vc.main(["verify", "criterion-2", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "length-N" in text and assets_hash() in text
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, vc.report_schema())
    assert doc["summary"]["pass"] == 3


def test_cli_exit_codes(capsys):
    assert vc.main(["verify", "no-such-thing"]) == 2
    assert vc.main(["verify", "nothing-*"]) == 0
    assert vc.main(["verify", "fast", "--prime", "4"]) == 2
    assert vc.main(["bogus"]) == 2
    assert vc.main(["verify", "length-RmodI", "--prime", "3", "--strict"]) == 1
    capsys.readouterr()


def test_cli_dumps(capsys):
    assert vc.main(["dump-matrix", "phi1"]) == 0
    assert "u" in capsys.readouterr().out
    assert vc.main(["dump-matrix", "psi-u"]) == 0
    assert capsys.readouterr().out.startswith("55 55 2")
    assert vc.main(["dump-complex", "phi"]) == 0
    assert json.loads(capsys.readouterr().out)["ranks"] == [1, 3, 4, 4, 4]
    assert vc.main(["dump-complex", "koszul-vw"]) == 0
    assert json.loads(capsys.readouterr().out)["ranks"] == [1, 2, 1]
    assert vc.main(["dump-matrix", "nope"]) == 2
    assert vc.main(["list"]) == 0
