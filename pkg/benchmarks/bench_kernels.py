"""Compare the jitted kernels against the pure-numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Timings use the best of
several repetitions after a warm-up call so jit compilation is excluded.
"""

import time

import numpy as np

from drcf.kernels import _numpy

try:
    from drcf.kernels import _numba

    BACKENDS = {"numpy": _numpy, "numba": _numba}
except ImportError:
    BACKENDS = {"numpy": _numpy}


def best_of(fn, reps=5):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(2000, 10))
    P = rng.normal(size=(64, 10))
    grid_rc = np.array([(r, c) for r in range(8) for c in range(8)], dtype=np.float64)
    n_steps = 20000
    order = rng.integers(0, X.shape[0], size=n_steps).astype(np.int64)
    lrs = np.linspace(0.5, 0.01, n_steps)
    sigmas = np.linspace(4.0, 0.5, n_steps)

    cases = {
        "bmu_batch (2000x10, 64 units)": lambda be: be.bmu_batch(P, X),
        "pairwise_sq_dists (2000x10)": lambda be: be.pairwise_sq_dists(X),
        "som_train_steps (20k steps)": lambda be: be.som_train_steps(
            X, P.copy(), grid_rc, order, lrs, sigmas
        ),
    }

    width = max(len(n) for n in cases)
    print(f"{'kernel'.ljust(width)}  " + "  ".join(f"{b:>10}" for b in BACKENDS) + "   speedup")
    for name, call in cases.items():
        timings = {}
        for bname, be in BACKENDS.items():
            call(be)  # warm-up (jit compile / cache touch)
            timings[bname] = best_of(lambda: call(be))
        cells = "  ".join(f"{timings[b] * 1e3:8.2f}ms" for b in BACKENDS)
        if "numba" in timings:
            speedup = timings["numpy"] / timings["numba"]
            print(f"{name.ljust(width)}  {cells}   {speedup:5.1f}x")
        else:
            print(f"{name.ljust(width)}  {cells}   (numba unavailable)")


if __name__ == "__main__":
    main()
