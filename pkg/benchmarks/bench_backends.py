#!/usr/bin/env python3
"""Timing comparison of the compiled backend against the NumPy fallback.

Runs the three hot kernels on representative workloads, checks that the two
implementations agree, and prints a speedup table. Usable on installs
without the compiled extension (it then reports the fallback only).

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from hte._backend import _ref

try:
    from hte._backend import _native
except ImportError:
    _native = None


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng):
    controls = rng.random((4000, 2))
    treatments = rng.random((4000, 2))
    queries = rng.random((512, 2))
    values = rng.standard_normal(4000)
    epan = np.array([0.75, 0.0, -0.75])
    return [
        ("match_nearest 4000x4000 d=2", "match_nearest", (controls, treatments)),
        ("sqdist_matrix 512x4000 d=2", "sqdist_matrix", (queries, controls)),
        ("nw_smooth 512q/4000p h=0.1", "nw_smooth", (controls, values, queries, 0.1, epan)),
    ]


def check_agreement(name, ref_out, nat_out):
    if isinstance(ref_out, tuple):
        return all(np.array_equal(r, n) for r, n in zip(ref_out, nat_out))
    if name.startswith("nw_smooth"):
        return np.allclose(ref_out, nat_out, rtol=1e-12, atol=1e-12)
    return np.array_equal(ref_out, nat_out)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []
    for label, fn_name, fn_args in workloads(rng):
        t_ref = best_of(args.repeat, getattr(_ref, fn_name), *fn_args)
        if _native is not None:
            t_nat = best_of(args.repeat, getattr(_native, fn_name), *fn_args)
            agree = check_agreement(
                fn_name, getattr(_ref, fn_name)(*fn_args), getattr(_native, fn_name)(*fn_args)
            )
            rows.append((label, t_ref, t_nat, t_ref / t_nat, agree))
        else:
            rows.append((label, t_ref, None, None, True))

    print(f"{'workload':34s} {'python':>10s} {'native':>10s} {'speedup':>8s}  agree")
    for label, t_ref, t_nat, speedup, agree in rows:
        nat = f"{t_nat * 1e3:8.2f}ms" if t_nat is not None else "       n/a"
        spd = f"{speedup:7.2f}x" if speedup is not None else "     n/a"
        print(f"{label:34s} {t_ref * 1e3:8.2f}ms {nat} {spd}  {agree}")
    if _native is None:
        print("\ncompiled backend not available; showing fallback timings only")
    elif not all(r[-1] for r in rows):
        raise SystemExit("backend outputs disagree")


if __name__ == "__main__":
    main()
