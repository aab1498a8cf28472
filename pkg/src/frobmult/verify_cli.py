"""Registry of named verifications and the ``frobmult`` command line.

Expected values live in ``data/expected.json`` with a provenance tag each
(``paper``, ``trivial`` or ``derived``).  A check computes its value from
scratch, compares it exactly and reports one of ``pass``, ``fail``,
``skipped`` or ``resource-capped``.  Intermediate objects shared by several
checks (the presentation of N, its resolution, ...) are cached per run.
"""
from __future__ import annotations

import argparse
import fnmatch
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources
from typing import Any, Callable, Sequence

from . import paperdata as pd
from .exactlin import FieldSpec, rank, to_text
from .groebner import (Caps, ResourceCapExceeded, ideal, is_regular_sequence, krull_dimension,
                       socle_data)
from .homology import (ChainComplex, FiniteLengthModule, base_change, betti_numbers,
                       coker_length, cokernel_module, euler_characteristic, free_resolution,
                       homology_vanishes, koszul_complex, koszul_matrices, presentation_of, tensor_length,
                       tor_lengths_scalar)

log = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "skipped", "resource-capped")
MONOMIAL_ORDER = "grevlex, position-over-term for modules"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    prime: int = 2
    frobenius_steps: int = 1
    max_degree: int = 64
    strict: bool = False
    optional: bool = False

    def __post_init__(self):
        FieldSpec(self.prime)
        if self.frobenius_steps < 0:
            raise UsageError("--frobenius-steps must be non-negative")
        if self.max_degree < 1:
            raise UsageError("--max-degree must be positive")

    @property
    def caps(self) -> Caps:
        return Caps(max_degree=self.max_degree)

    def echo(self) -> dict:
        return {"prime": self.prime, "frobenius_steps": self.frobenius_steps, "order": MONOMIAL_ORDER,
                "caps": {"max_degree": self.max_degree}, "strict": self.strict, "optional": self.optional}


@dataclass
class Expectation:
    name: str
    criterion: int
    expected: Any
    provenance: str
    level: str
    primes: Any
    tags: tuple[str, ...]
    description: str
    min_frobenius_steps: int = 0

    def allows_prime(self, p: int) -> bool:
        return self.primes == "any" or p in self.primes


@dataclass
class CheckReport:
    check: str
    criterion: int
    expected: Any
    computed: Any
    provenance: str
    status: str
    seconds: float
    config: dict
    message: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def load_expectations() -> dict[str, Expectation]:
    raw = json.loads(resources.files("frobmult").joinpath("data/expected.json").read_text())
    out = {}
    for e in raw["checks"]:
        e = dict(e)
        e["tags"] = tuple(e["tags"])
        out[e["name"]] = Expectation(**e)
    return out


# ---------------------------------------------------------------------------
# shared intermediate objects
# ---------------------------------------------------------------------------

class Context:
    """Lazily built objects shared between checks of one run."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.p = config.prime
        self.caps = config.caps
        self._cache: dict[str, Any] = {}

    def get(self, key: str, build: Callable[[], Any]):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def A(self):
        return pd.build_A(self.p)

    @property
    def N(self):
        return pd.build_N(self.p)

    @property
    def R(self):
        return pd.build_R_presentation()

    def presentation(self, twisted: bool = False):
        mod = pd.build_N_twisted(self.p) if twisted else self.N
        return self.get(f"pres{twisted}", lambda: presentation_of(mod, self.A, caps=self.caps))

    def resolution_N(self):
        return self.get("resN", lambda: free_resolution(self.presentation(), 8, self.caps))

    def over_R(self, twisted: bool = False, frobenius: int = 0):
        d1 = self.presentation(twisted).frobenius(frobenius)
        return base_change(ChainComplex(self.A, [d1]), self.R, pd.r_images_of_A()).d(1)

    def phi(self):
        return pd.build_phi_complex(self.p)

    def phi_Q(self):
        """The resolution of A/P transported along the automorphism exchanging u and x."""
        ring = self.A.ring
        swap = {"u": ring.var("x"), "x": ring.var("u")}
        return self.get("phiQ", lambda: self.phi().map(lambda f: f.map_to(ring, swap)))

    def tor_P_scalar(self):
        return self.get("torPs", lambda: tor_lengths_scalar(self.N, self.phi(), 8))

    def tor_P_groebner(self):
        def build():
            res = free_resolution(pd.ideal_complex(list(pd.IDEALS["P"].generators), self.A), 9, self.caps)
            return tor_lengths_scalar(self.N, res, 8)
        return self.get("torPg", build)

    def resolution_P(self):
        """P = im phi_1 = coker phi_2, resolved by phi_2, phi_3, phi_4, phi_3, ..."""
        phi = self.phi()
        return ChainComplex(self.A, [phi.d(2), phi.d(3), phi.d(4)], period=2)

    def r_over_A(self):
        return pd.r_over_A(self.caps)

    def frobenius_N_module(self, n: int) -> FiniteLengthModule:
        return self.get(f"FN{n}", lambda: cokernel_module(self.presentation().frobenius(n), self.caps))

    def length_M_groebner(self, twisted: bool = False):
        return self.get(f"lM{twisted}", lambda: coker_length(self.over_R(twisted), self.caps))

    def frobenius_M_scalar(self, n: int, twisted: bool = False) -> int:
        def build():
            if n == 0:
                mod = pd.build_N_twisted(self.p) if twisted else self.N
            elif twisted:
                mod = cokernel_module(self.presentation(True).frobenius(n), self.caps)
            else:
                mod = self.frobenius_N_module(n)
            return tensor_length(self.r_over_A(), mod)
        return self.get(f"FMs{n}{twisted}", build)


# ---------------------------------------------------------------------------
# the checks
# ---------------------------------------------------------------------------

CHECKS: dict[str, Callable[[Context], Any]] = {}


def check(name: str):
    def deco(fn):
        CHECKS[name] = fn
        return fn
    return deco


@check("rank-alpha")
def _rank_alpha(ctx):
    return rank(pd.alpha(ctx.p))


@check("rank-beta")
def _rank_beta(ctx):
    return rank(pd.beta(ctx.p))


@check("rank-sum")
def _rank_sum(ctx):
    return rank(pd.alpha(ctx.p)) + rank(pd.beta(ctx.p))


@check("rank-alpha1")
def _rank_alpha1(ctx):
    return rank(pd.alpha1(ctx.p))


@check("rank-beta1")
def _rank_beta1(ctx):
    return rank(pd.beta1(ctx.p))


@check("length-N")
def _length_n(ctx):
    return ctx.N.dim


@check("N-commuting-pairs")
def _commuting(ctx):
    acts = ctx.N.actions
    return sum(1 for i in range(len(acts)) for j in range(i + 1, len(acts)) if acts[i] @ acts[j] == acts[j] @ acts[i])


@check("N-hypersurface")
def _hypersurface(ctx):
    return ctx.N.satisfies(ctx.A.relations)


@check("tor-N-AmodP-scalar")
def _tor_scalar(ctx):
    return ctx.tor_P_scalar()


@check("tor-N-AmodP-groebner")
def _tor_groebner(ctx):
    return ctx.tor_P_groebner()


@check("tor-N-AmodP-routes-agree")
def _tor_agree(ctx):
    return ctx.tor_P_scalar() == ctx.tor_P_groebner()


@check("tor-N-AmodP-vanishing")
def _tor_vanishing(ctx):
    return ctx.tor_P_scalar()[3:]


@check("chi-N-AmodP")
def _chi_p(ctx):
    return euler_characteristic(ctx.tor_P_scalar())


@check("resolution-N-length")
def _res_length(ctx):
    res = ctx.resolution_N()
    if not res.finite:
        return None
    return res.length


@check("resolution-N-H0")
def _res_h0(ctx):
    return coker_length(ctx.resolution_N().d(1), ctx.caps)


@check("resolution-N-betti")
def _res_betti(ctx):
    res = ctx.resolution_N()
    return list(res.notes.get("local_betti") or betti_numbers(res))


@check("resolution-N-betti-oracle")
def _betti_oracle(ctx):
    k = FiniteLengthModule.residue_field(ctx.A.names, ctx.p)
    res_k = free_resolution(presentation_of(k, ctx.A, caps=ctx.caps), 8, ctx.caps)
    return tor_lengths_scalar(ctx.N, res_k, 7)


@check("frobenius-N-n1")
def _frob_n(ctx):
    return coker_length(ctx.presentation().frobenius(1), ctx.caps)


def _ideal_I(ctx):
    Rp = ctx.R
    return ctx.get("gbI", lambda: ideal(pd.named_ideal("I").polynomials(Rp), Rp, ctx.caps))


@check("length-RmodI")
def _len_rmodi(ctx):
    return _ideal_I(ctx).quotient_length()


@check("socle-RmodI")
def _socle(ctx):
    return socle_data(_ideal_I(ctx))[1]


@check("socle-generator-ze")
def _socle_ze(ctx):
    gb = _ideal_I(ctx)
    vecs, dim = socle_data(gb)
    ze = gb.normal_form(dict(ctx.R.parse("z*e").terms))
    return dim == 1 and bool(ze) and vecs[0] == ze


@check("regular-sequence-I")
def _regseq(ctx):
    Rp = ctx.R
    seq = [Rp.parse(s) for s in ("u", "x", "v", "y", "w - z")]
    return is_regular_sequence(seq, Rp, ctx.caps)


@check("krull-dim-R")
def _krull(ctx):
    return krull_dimension(ideal([], ctx.R, ctx.caps))


@check("exact-sequence")
def _exact(ctx):
    return pd.check_exact_sequence(caps=ctx.caps).ok


@check("length-M-groebner")
def _len_m(ctx):
    return ctx.length_M_groebner()


@check("length-M-scalar")
def _len_m_scalar(ctx):
    return ctx.frobenius_M_scalar(0)


@check("acyclicity-M-scalar")
def _acyclic_scalar(ctx):
    res_R = ctx.get("resR", lambda: free_resolution(ctx.r_over_A(), 8, ctx.caps))
    return tor_lengths_scalar(ctx.N, res_R, 6)[1:]


def _G(ctx):
    return ctx.get("G", lambda: base_change(ctx.resolution_N(), ctx.R, pd.r_images_of_A()))


@check("acyclicity-M-groebner-H1")
def _acyclic_h1(ctx):
    return homology_vanishes(_G(ctx), 1, ctx.caps)


@check("acyclicity-M-groebner")
def _acyclic_groebner(ctx):
    G = _G(ctx)
    return [homology_vanishes(G, i, ctx.caps) for i in range(1, G.length + 1)]


def _chi_N_P(ctx):
    return ctx.get("chiNP", lambda: euler_characteristic(tor_lengths_scalar(ctx.N, ctx.resolution_P(), 8)))


@check("chi-N-P")
def _chi_np(ctx):
    return _chi_N_P(ctx)


@check("additivity-M")
def _additivity(ctx):
    n = ctx.N.dim
    chi_p = euler_characteristic(ctx.tor_P_scalar())
    chi_P = _chi_N_P(ctx)
    return ctx.length_M_groebner() == 3 * n + chi_P and chi_P == n - chi_p


def _frobenius_M_groebner(ctx, n):
    return ctx.get(f"FMg{n}", lambda: coker_length(ctx.over_R(frobenius=n), ctx.caps))


@check("frobenius-M-n1")
def _frob_m1(ctx):
    return _frobenius_M_groebner(ctx, 1)


@check("frobenius-M-n1-fallback")
def _frob_m1_fallback(ctx):
    return ctx.frobenius_M_scalar(1)


@check("chern-ch3")
def _chern(ctx):
    # l(F^n M) = 220 q^5 + c3 q^3 + c1 q with q = 2^n, measured at n = 0, 1
    a0 = ctx.frobenius_M_scalar(0) - 220
    a1 = ctx.frobenius_M_scalar(1) - 220 * 32
    c3 = Fraction(a1 - 2 * a0, 6)
    c1 = a0 - c3
    return [int(c) if c.denominator == 1 else str(c) for c in (c3, c1)]


@check("frobenius-M-n2")
def _frob_m2(ctx):
    return _frobenius_M_groebner(ctx, 2)


@check("chi-Ntwist-AmodP")
def _chi_twist(ctx):
    return euler_characteristic(tor_lengths_scalar(pd.build_N_twisted(ctx.p), ctx.phi(), 8))


@check("chi-N-AmodQ")
def _chi_q(ctx):
    return euler_characteristic(tor_lengths_scalar(ctx.N, ctx.phi_Q(), 8))


@check("chi-N-AmodQ-groebner")
def _chi_q_groebner(ctx):
    res = free_resolution(pd.ideal_complex(list(pd.IDEALS["Q"].generators), ctx.A), 9, ctx.caps)
    return euler_characteristic(tor_lengths_scalar(ctx.N, res, 8))


@check("chi-N-koszul-vw")
def _koszul(ctx):
    return koszul_complex([ctx.A.parse("v"), ctx.A.parse("w")], ctx.N, ctx.A).euler_characteristic()


@check("length-Mtwist")
def _len_mtwist(ctx):
    return ctx.length_M_groebner(twisted=True)


@check("frobenius-Mtwist-n1")
def _frob_mtwist(ctx):
    return ctx.frobenius_M_scalar(1, twisted=True)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def run_check(name: str, config: RunConfig | None = None, ctx: Context | None = None,
              explicit: bool = True) -> CheckReport:
    """Run one registered check and compare against its expected value.

    Checks tagged ``optional`` run when requested by name (``explicit``) or
    with ``config.optional``; inside a suite they are skipped otherwise.
    """
    config = config or RunConfig()
    exps = load_expectations()
    if name not in exps or name not in CHECKS:
        raise KeyError(f"unknown check {name!r}")
    exp = exps[name]
    ctx = ctx or Context(config)
    base = dict(check=name, criterion=exp.criterion, expected=exp.expected, provenance=exp.provenance,
                config=config.echo())
    if not exp.allows_prime(config.prime):
        why = ("R-level checks need characteristic 2 (R adjoins square roots)" if exp.level == "R"
               else "expected value is recorded for characteristic 2 only")
        return CheckReport(computed=None, status="skipped", seconds=0.0, message=why, **base)
    if config.frobenius_steps < exp.min_frobenius_steps:
        return CheckReport(computed=None, status="skipped", seconds=0.0,
                           message=f"optional; needs --frobenius-steps {exp.min_frobenius_steps}", **base)
    if "optional" in exp.tags and not exp.min_frobenius_steps and not (config.optional or explicit):
        return CheckReport(computed=None, status="skipped", seconds=0.0, message="optional; pass --optional",
                           **base)
    t0 = time.perf_counter()
    try:
        value = CHECKS[name](ctx)
    except ResourceCapExceeded as e:
        return CheckReport(computed=None, status="resource-capped", seconds=time.perf_counter() - t0,
                           message=str(e), **base)
    except Exception as e:  # reported, not raised: one broken check must not hide the others
        log.exception("check %s raised", name)
        return CheckReport(computed=None, status="fail", seconds=time.perf_counter() - t0,
                           message=f"{type(e).__name__}: {e}", **base)
    status = "pass" if value == exp.expected and type(value) is type(exp.expected) else "fail"
    return CheckReport(computed=value, status=status, seconds=time.perf_counter() - t0, **base)


def select(selector: str) -> list[str]:
    """Check names matching a suite name, tag, provenance, ``criterion-N`` or name glob."""
    exps = load_expectations()
    names = list(exps)
    if selector == "all":
        return [n for n in names if "optional" not in exps[n].tags] + \
               [n for n in names if "optional" in exps[n].tags]
    if selector.startswith("criterion-"):
        try:
            k = int(selector.split("-", 1)[1])
        except ValueError:
            return []
        return [n for n in names if exps[n].criterion == k]
    if selector in ("paper", "derived", "trivial"):
        return [n for n in names if exps[n].provenance == selector]
    tagged = [n for n in names if selector in exps[n].tags]
    if tagged:
        return tagged
    return [n for n in names if fnmatch.fnmatchcase(n, selector)]


def run_suite(selector: str, config: RunConfig | None = None) -> tuple[list[CheckReport], int]:
    """Run every selected check; the exit status is 1 on any failure, else 0.

    Skipped and capped checks fail the suite only with ``strict``.
    """
    config = config or RunConfig()
    names = select(selector)
    if not names:
        log.warning("no checks match %r", selector)
    ctx = Context(config)
    reports = [run_check(n, config, ctx, explicit=False) for n in names]
    return reports, exit_status(reports, config.strict)


def exit_status(reports: Sequence[CheckReport], strict: bool = False) -> int:
    bad = {"fail"} | ({"skipped", "resource-capped"} if strict else set())
    return 1 if any(r.status in bad for r in reports) else 0


def report_json(reports: Sequence[CheckReport], config: RunConfig, selector: str) -> dict:
    counts = {s: sum(r.status == s for r in reports) for s in STATUSES}
    return {
        "selector": selector,
        "assets_hash": pd.assets_hash(),
        "config": config.echo(),
        "checks": [r.to_json() for r in reports if r.provenance != "derived"],
        "derived_checks": [r.to_json() for r in reports if r.provenance == "derived"],
        "summary": {"total": len(reports), **counts, "exit_status": exit_status(reports, config.strict)},
    }


def report_schema() -> dict:
    return json.loads(resources.files("frobmult").joinpath("data/report.schema.json").read_text())


def format_reports(reports: Sequence[CheckReport]) -> str:
    lines = []

    def block(title, rows):
        if not rows:
            return
        lines.append(title)
        for r in rows:
            shown = r.computed if r.status != "skipped" else "-"
            extra = f"  ({r.message})" if r.message else ""
            lines.append(f"  [{r.status:>15}] {r.check:<28} expected {r.expected!s:<24} "
                         f"computed {shown!s:<24} {r.seconds:7.2f}s{extra}")

    block("paper-anchored checks", [r for r in reports if r.provenance != "derived"])
    block("derived checks", [r for r in reports if r.provenance == "derived"])
    counts = ", ".join(f"{sum(r.status == s for r in reports)} {s}" for s in STATUSES)
    lines.append(f"{len(reports)} checks: {counts}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _matrix_sources(p: int) -> dict[str, Callable[[], Any]]:
    out: dict[str, Callable[[], Any]] = {
        "alpha": lambda: pd.alpha(p),
        "beta": lambda: pd.beta(p),
        "alpha1": lambda: pd.alpha1(p),
        "beta1": lambda: pd.beta1(p),
        "presentation-N": lambda: presentation_of(pd.build_N(p), pd.build_A(p)),
        "R-over-A": lambda: pd.r_over_A(),
    }
    for i in range(1, 5):
        out[f"phi{i}"] = (lambda i=i: pd.load_phi(i, pd.build_A(p)))
    for name, u in zip(pd.A_VARS, range(6)):
        out[f"psi-{name}"] = (lambda u=u: pd.build_N(p).actions[u])
    return out


def _complex_sources(p: int) -> dict[str, Callable[[], ChainComplex]]:
    return {
        "phi": lambda: pd.build_phi_complex(p),
        "resolution-N": lambda: free_resolution(presentation_of(pd.build_N(p), pd.build_A(p)), 8),
        "resolution-R-over-A": lambda: free_resolution(pd.r_over_A(), 6),
        "koszul-vw": lambda: _koszul_vw(pd.build_A(p)),
    }


def _koszul_vw(A) -> ChainComplex:
    return ChainComplex(A, koszul_matrices([A.parse("v"), A.parse("w")], A))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobmult", description="Run the verification checks.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress of long computations")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a check, a suite (all, fast, paper, derived, criterion-N, a tag) or a glob")
    v.add_argument("target")
    v.add_argument("--prime", type=int, default=2)
    v.add_argument("--frobenius-steps", type=int, default=1)
    v.add_argument("--max-degree", type=int, default=Caps().max_degree)
    v.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    v.add_argument("--strict", action="store_true", help="skipped and capped checks count as failures")
    v.add_argument("--optional", action="store_true", help="also run long optional checks inside suites")

    sub.add_parser("list", help="list registered checks")

    m = sub.add_parser("dump-matrix", help="print a matrix in the text format of the data assets")
    m.add_argument("name")
    m.add_argument("--prime", type=int, default=2)

    c = sub.add_parser("dump-complex", help="print a complex as JSON")
    c.add_argument("name")
    c.add_argument("--prime", type=int, default=2)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list":
            for e in load_expectations().values():
                print(f"{e.name:<28} criterion {e.criterion:<3} {e.provenance:<8} {','.join(e.tags)}")
            return 0
        if args.command == "verify":
            return _verify(args)
        if args.command == "dump-matrix":
            src = _matrix_sources(FieldSpec(args.prime).p)
            if args.name not in src:
                raise UsageError(f"unknown matrix {args.name!r}; choose from {', '.join(src)}")
            m = src[args.name]()
            print(m.to_text() if hasattr(m, "to_text") else to_text(m))
            return 0
        if args.command == "dump-complex":
            src = _complex_sources(FieldSpec(args.prime).p)
            if args.name not in src:
                raise UsageError(f"unknown complex {args.name!r}; choose from {', '.join(src)}")
            print(src[args.name]().dumps())
            return 0
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


def _verify(args) -> int:
    config = RunConfig(prime=args.prime, frobenius_steps=args.frobenius_steps, max_degree=args.max_degree,
                       strict=args.strict, optional=args.optional)
    exps = load_expectations()
    if args.target in exps:
        reports = [run_check(args.target, config)]
        code = exit_status(reports, config.strict)
    else:
        names = select(args.target)
        if not names and not any(ch in args.target for ch in "*?["):
            raise UsageError(f"unknown check or suite {args.target!r}")
        reports, code = run_suite(args.target, config)
        if not names:
            print(f"warning: no checks match {args.target!r}", file=sys.stderr)
    print(format_reports(reports))
    print(f"assets {pd.assets_hash()}")
    if args.json:
        doc = json.dumps(report_json(reports, config, args.target), indent=1)
        if args.json == "-":
            print(doc)
        else:
            with open(args.json, "w") as fh:
                fh.write(doc + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
