"""Compute a free resolution of N over A and report its shape."""
import time

from frobmult import paperdata as pd
from frobmult.homology import betti_numbers, coker_length, free_resolution, presentation_of


def main():
    A, N = pd.build_A(), pd.build_N()
    t0 = time.perf_counter()
    d1 = presentation_of(N, A)
    print(f"presentation: {d1.rows} x {d1.cols}  ({time.perf_counter() - t0:.1f}s)")
    t0 = time.perf_counter()
    res = free_resolution(d1, 8)
    print(f"resolution: {time.perf_counter() - t0:.1f}s")
    print("  length      ", res.length)
    print("  finite      ", res.finite)
    print("  ranks       ", res.ranks())
    print("  local betti ", betti_numbers(res))
    print("  d^2 = 0     ", res.compositions_vanish())
    print("  H_0         ", coker_length(res.d(1)))


if __name__ == "__main__":
    main()
