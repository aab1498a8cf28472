"""One test per acceptance criterion; each records a pass/fail line that is
printed in the terminal summary.  All comparisons are exact."""
import time

import pytest

from frobmult import verify_cli as vc

from conftest import ACCEPTANCE

CONFIG = vc.RunConfig()


@pytest.fixture(scope="module")
def ctx():
    return vc.Context(CONFIG)


def _run(ctx, k, names, budget=None, allow_capped=()):
    t0 = time.perf_counter()
    reports = [vc.run_check(n, CONFIG, ctx) for n in names]
    secs = time.perf_counter() - t0
    ok = all(r.status == "pass" or (r.check in allow_capped and r.status == "resource-capped") for r in reports)
    if budget is not None:
        ok = ok and secs < budget
    detail = ", ".join(f"{r.check}={r.computed}" if r.status == "pass" else f"{r.check}:{r.status}"
                       for r in reports)
    limit = f" (< {budget:g}s)" if budget is not None else ""
    ACCEPTANCE[k] = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {secs:7.2f}s{limit}  {detail}"
    failed = [(r.check, r.expected, r.computed, r.status, r.message) for r in reports if r.status != "pass"]
    return ok, reports, failed, secs


def test_criterion_01_ranks(ctx):
    ok, _, failed, secs = _run(ctx, 1, ["rank-alpha", "rank-beta", "rank-sum"], budget=1.0)
    assert ok, (failed, secs)


def test_criterion_02_module_N(ctx):
    ok, _, failed, secs = _run(ctx, 2, ["length-N", "N-commuting-pairs", "N-hypersurface"], budget=1.0)
    assert ok, (failed, secs)


def test_criterion_03_tor_two_routes(ctx):
    names = ["tor-N-AmodP-scalar", "tor-N-AmodP-groebner", "tor-N-AmodP-routes-agree",
             "tor-N-AmodP-vanishing", "chi-N-AmodP"]
    ok, reports, failed, secs = _run(ctx, 3, names, budget=10.0)
    assert ok, (failed, secs)
    scalar, groebner = reports[0].computed, reports[1].computed
    assert scalar == groebner and len(scalar) == 9


@pytest.mark.slow
def test_criterion_04_finite_resolution(ctx):
    ok, _, failed, _ = _run(ctx, 4, ["resolution-N-length", "resolution-N-H0"])
    assert ok, failed
    res = ctx.resolution_N()
    assert res.finite and res.compositions_vanish()


def test_criterion_05_frobenius_over_A(ctx):
    ok, _, failed, _ = _run(ctx, 5, ["frobenius-N-n1"])
    assert ok, failed
    assert 1760 == 55 * 2 ** 5


def test_criterion_06_ring_R(ctx):
    ok, _, failed, _ = _run(ctx, 6, ["length-RmodI", "socle-RmodI", "socle-generator-ze", "regular-sequence-I"],
                            budget=60.0)
    assert ok, failed


def test_criterion_07_exact_sequence(ctx):
    ok, _, failed, _ = _run(ctx, 7, ["exact-sequence"])
    assert ok, failed


@pytest.mark.slow
def test_criterion_08_length_and_acyclicity(ctx):
    names = ["length-M-groebner", "length-M-scalar", "acyclicity-M-scalar", "acyclicity-M-groebner-H1",
             "chi-N-P", "additivity-M"]
    ok, reports, failed, _ = _run(ctx, 8, names)
    assert ok, failed
    assert 222 == 3 * 55 + 57 and 57 == 55 - (-2)


@pytest.mark.slow
def test_criterion_09_frobenius_over_R(ctx):
    ok, reports, failed, _ = _run(ctx, 9, ["frobenius-M-n1", "frobenius-M-n1-fallback", "chern-ch3"],
                                  budget=30 * 60.0, allow_capped=("frobenius-M-n1",))
    assert ok, failed
    assert 7056 == 220 * 2 ** 5 + 2 * 2 ** 3
    # n = 2 is registered but skipped by default
    assert vc.run_check("frobenius-M-n2", CONFIG, ctx).status == "skipped"


@pytest.mark.slow
def test_criterion_10_twisted_module(ctx):
    ok, _, failed, _ = _run(ctx, 10, ["chi-Ntwist-AmodP", "chi-N-AmodQ", "chi-N-AmodQ-groebner",
                                      "chi-N-koszul-vw", "length-Mtwist"])
    assert ok, failed


def test_criterion_11_property_suites():
    import test_exactlin
    import test_groebner
    import test_homology

    suites = {
        "normal-form idempotence": test_groebner.test_normal_form_is_idempotent_and_canonical,
        "rank-nullity": test_exactlin.test_rank_nullity,
        "d^2 = 0": test_homology.test_d_squared_vanishes,
        "frobenius composition": test_homology.test_frobenius_composition_law,
        "reduced-basis determinism": test_groebner.test_reduced_basis_is_deterministic,
    }
    t0 = time.perf_counter()
    failed = []
    for name, prop in suites.items():
        try:
            prop()
        except Exception as e:  # collect all, then fail once
            failed.append(f"{name}: {type(e).__name__}")
    secs = time.perf_counter() - t0
    from hypothesis import settings
    n = settings.default.max_examples
    ok = not failed and n >= 100
    ACCEPTANCE[11] = (f"criterion 11: {'PASS' if ok else 'FAIL'}  {secs:7.2f}s  "
                      f"{len(suites)} property suites x {n} cases" + (f"; failed {failed}" if failed else ""))
    assert ok, failed
