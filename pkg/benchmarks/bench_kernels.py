"""Benchmark the compiled kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on a workload shaped like the real pipeline (room
simulation, spectrogram resynthesis, UBM E-step, short-time
normalization). The compiled path is warmed once so compilation time is
reported separately from steady-state throughput.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from robustsv import kernels


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads(rng: np.random.Generator):
    dims = np.array([6.1, 4.7, 3.0])
    beta = np.full(6, 0.82)
    src = np.array([1.5, 2.2, 1.4])
    mic = np.array([4.0, 1.9, 1.6])
    frames = rng.standard_normal((600, 200))
    window = np.hamming(200)
    x = rng.standard_normal((4000, 60))
    means = rng.standard_normal((64, 60))
    inv_vars = 1.0 / (0.5 + rng.random((64, 60)))
    log_consts = rng.standard_normal(64)
    feats = rng.standard_normal((3000, 20))
    return [
        ("image_source_taps",
         lambda: kernels.image_source_taps(dims, beta, src, mic, 10,
                                           8000.0, 343.0, 12000)),
        ("overlap_add",
         lambda: kernels.overlap_add(frames, 80, window)),
        ("gmm_logprob",
         lambda: kernels.gmm_logprob(x, means, inv_vars, log_consts)),
        ("sliding_moments",
         lambda: kernels.sliding_moments(feats, 150)),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not kernels.have_numba():
        print("numba unavailable; only the numpy path can run")
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in workloads(rng):
        kernels.set_numba(False)
        t_np = _time(fn, args.repeat)
        t_nb = float("nan")
        compile_s = float("nan")
        if kernels.have_numba():
            kernels.set_numba(True)
            start = time.perf_counter()
            fn()  # includes (cached) compilation
            compile_s = time.perf_counter() - start
            t_nb = _time(fn, args.repeat)
        rows.append((name, t_np, t_nb, compile_s))
    kernels.set_numba(True)

    print(f"{'kernel':<20}{'numpy (ms)':>12}{'numba (ms)':>12}"
          f"{'speedup':>9}{'first call (ms)':>17}")
    for name, t_np, t_nb, compile_s in rows:
        speedup = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{name:<20}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}"
              f"{speedup:>9.2f}{compile_s * 1e3:>17.1f}")


if __name__ == "__main__":
    main()
