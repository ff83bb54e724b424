"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--seed S]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lpaf import kernels
from lpaf.pnorm import operator_p_norm, oracle_p_norm_2x2


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    cases = {
        "power iteration, complex 8x8, p=1.5": (
            lambda a=rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)): operator_p_norm(a, 1.5)),
        "power iteration, complex 24x24, p=3": (
            lambda a=rng.normal(size=(24, 24)) + 1j * rng.normal(size=(24, 24)): operator_p_norm(a, 3)),
        "2x2 grid oracle, p=1.5": (
            lambda a=rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)): oracle_p_norm_2x2(a, 1.5)),
    }
    backends = kernels.available_backends()
    before = kernels.BACKEND
    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b in backends))
    try:
        for name, fn in cases.items():
            row = []
            for b in backends:
                kernels.use_backend(b)
                row.append(_time(fn, args.repeat))
            print(f"{name:40s}" + "".join(f"{t * 1e3:10.1f}ms" for t in row))
    finally:
        kernels.use_backend(before)


if __name__ == "__main__":
    main()
