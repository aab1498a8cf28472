"""Lengths of Frobenius iterates of N over A and of M = N (x)_A R over R.

Both routes are printed for M: a Groebner basis over R, and F^n_A(N) (x)_A R
computed by linear algebra.  They agree because Frobenius commutes with base
change.  ``--steps 2`` needs far more memory than n = 1.
"""
import argparse
import time
from fractions import Fraction

from frobmult import verify_cli as vc


def timed(fn):
    t0 = time.perf_counter()
    v = fn()
    return v, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--steps", type=int, default=1)
    ap.add_argument("--skip-groebner", action="store_true", help="only the linear-algebra route over R")
    ap.add_argument("--twisted", action="store_true", help="use N' (u and x exchanged)")
    args = ap.parse_args(argv)

    ctx = vc.Context(vc.RunConfig())
    lengths = {}
    for n in range(args.steps + 1):
        fn, t_n = timed(lambda: ctx.frobenius_N_module(n).dim if n else ctx.N.dim)
        fm, t_s = timed(lambda: ctx.frobenius_M_scalar(n, args.twisted))
        line = f"n={n}  l(F^n N)={fn} ({t_n:.1f}s)  l(F^n M) scalar={fm} ({t_s:.1f}s)"
        if not args.skip_groebner:
            from frobmult.homology import coker_length
            fg, t_g = timed(lambda: coker_length(ctx.over_R(args.twisted, n), ctx.caps))
            line += f"  groebner={fg} ({t_g:.1f}s)"
        print(line)
        lengths[n] = fm

    # l(F^n M) = 220 q^5 + c3 q^3 + c1 q, q = 2^n
    if 1 in lengths:
        a0, a1 = lengths[0] - 220, lengths[1] - 220 * 32
        c3 = Fraction(a1 - 2 * a0, 6)
        print(f"c3 = {c3}, c1 = {a0 - c3}")
        if 2 in lengths:
            pred = 220 * 2 ** 10 + c3 * 64 + (a0 - c3) * 4
            print(f"predicted n=2: {pred}, computed: {lengths[2]}")


if __name__ == "__main__":
    main()
