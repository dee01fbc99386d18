#!/usr/bin/env python3
"""Numba kernels against their numpy twins on the workloads the library actually runs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each row checks that both backends return identical arrays before timing.
JIT compilation is triggered once up front and not counted.
"""

import argparse
import time

import numpy as np

from cantor_perm import kernels
from cantor_perm.exact import CERT_PRIME
from cantor_perm.finsets import fiber_masks
from cantor_perm.linmon import gram_matrix

NB = kernels.backend("numba")
NP = kernels.backend("numpy")


def ample_case():
    sizes = (2, 2, 2, 2)
    fm = np.array(fiber_masks(sizes), dtype=np.int64)
    return "ample masks, [2]^4 (2^16 subsets)", lambda k: k.ample_masks(fm, 16)


def table_case(kind, name):
    masks = np.arange(1, 512, dtype=np.int64)
    return f"3x3 {name} multiplication table", lambda k: k.sr_products(kind, 3, 3, 3, masks, masks)


def rref_case():
    g = gram_matrix("bool", 3) % CERT_PRIME
    return "rref mod p, 511x511 trace form", lambda k: k.rref_mod_p(g.copy(), CERT_PRIME)


def lift_case():
    rng = np.random.default_rng(0)
    nk = 18
    proj = rng.integers(0, 6, size=(2, nk)).astype(np.int64)
    targets = np.array([0b111111, 0b111111], dtype=np.int64)
    return "lift matches, 18 chain points", lambda k: k.lift_matches(nk, proj, targets)


def zeta_case():
    v = np.random.default_rng(1).integers(-3, 4, size=1 << 18).astype(np.int64)
    return "superset zeta, 2^18 entries", lambda k: k.zeta_superset(v)


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cases = [ample_case(), table_case(kernels.F2, "F2"), table_case(kernels.BOOL, "Boolean"),
             rref_case(), lift_case(), zeta_case()]

    t0 = time.perf_counter()
    for _, fn in cases:
        fn(NB)
    print(f"JIT warmup: {time.perf_counter() - t0:.1f}s\n")

    print(f"{'workload':<36} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8}  same")
    print("-" * 74)
    for label, fn in cases:
        ok = same(fn(NP), fn(NB))
        t_np = best_of(lambda: fn(NP), args.repeat)
        t_nb = best_of(lambda: fn(NB), args.repeat)
        print(f"{label:<36} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x  {'ok' if ok else 'MISMATCH'}")


if __name__ == "__main__":
    main()
