"""Benchmark the compiled kernel core against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats N]

Exercises the hot paths behind marginalization (completion enumeration,
mixture averaging) and monte-carlo noise (bulk sigmoid draws).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from epirisk.kernels import _pykernels

try:
    from epirisk.kernels import _ckernels
except ImportError:
    _ckernels = None


def _timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def make_cases(rng: np.random.Generator) -> dict[str, tuple]:
    k = 12
    linear_adds = rng.normal(0.0, 0.8, k)
    pair_matrix = rng.normal(0.0, 0.2, (k, k))
    pair_matrix = (pair_matrix + pair_matrix.T) / 2.0
    np.fill_diagonal(pair_matrix, 0.0)
    priors = rng.uniform(0.05, 0.95, k)
    predictors = rng.normal(-2.0, 1.5, 1 << k)
    weights = rng.dirichlet(np.ones(1 << k))
    noise = rng.normal(0.0, 0.5, 10_000)
    values = rng.uniform(0.0, 1.0, 10_000)
    return {
        "completion_offsets (k=12)": ("completion_offsets", (linear_adds, np.ascontiguousarray(pair_matrix))),
        "completion_weights (k=12)": ("completion_weights", (priors,)),
        "mixture_mean (4096 terms)": ("mixture_mean", (weights, predictors)),
        "draw_risks (10k draws)": ("draw_risks", (-2.5, noise)),
        "sequential_mean (10k)": ("sequential_mean", (values,)),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20, help="timing repetitions (best-of)")
    args = parser.parse_args()

    rng = np.random.Generator(np.random.PCG64(7))
    cases = make_cases(rng)

    if _ckernels is None:
        print("compiled backend unavailable; showing pure-Python timings only")
    header = f"{'kernel':<28} {'python':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, (name, case_args) in cases.items():
        py_fn = getattr(_pykernels, name)
        py_time = _timeit(lambda: py_fn(*case_args), args.repeats)
        if _ckernels is None:
            print(f"{label:<28} {py_time * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
            continue
        c_fn = getattr(_ckernels, name)
        c_time = _timeit(lambda: c_fn(*case_args), args.repeats)
        py_result = py_fn(*case_args)
        c_result = c_fn(*case_args)
        same = np.allclose(np.asarray(py_result, dtype=float), np.asarray(c_result, dtype=float), rtol=0, atol=0)
        flag = "" if same else "  RESULTS DIFFER"
        print(f"{label:<28} {py_time * 1e3:>10.3f}ms {c_time * 1e3:>10.3f}ms {py_time / c_time:>8.1f}x{flag}")


if __name__ == "__main__":
    main()
