"""Pure-numpy reference implementations of the hot kernels.

These are the fallback path used when numba is unavailable or disabled via
``DRCF_DISABLE_NUMBA=1``.  Semantics must match ``_numba`` exactly; the
benchmark in ``benchmarks/bench_kernels.py`` compares both backends.
"""

import numpy as np


def bmu_index(prototypes, x):
    """Flat index of the prototype closest to ``x`` (first wins on ties)."""
    d2 = np.sum((prototypes - x) ** 2, axis=1)
    return int(np.argmin(d2))


def bmu_batch(prototypes, X):
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        out[i] = bmu_index(prototypes, X[i])
    return out


def som_train_steps(X, prototypes, grid_rc, order, lrs, sigmas):
    """Run the online SOM update schedule in-place on ``prototypes``.

    ``order`` holds the sample index per step; ``lrs``/``sigmas`` the decayed
    learning rate and neighborhood radius per step.
    """
    for t in range(order.shape[0]):
        x = X[order[t]]
        bmu = bmu_index(prototypes, x)
        gd2 = np.sum((grid_rc - grid_rc[bmu]) ** 2, axis=1)
        h = np.exp(-gd2 / (2.0 * sigmas[t] * sigmas[t]))
        prototypes += (lrs[t] * h)[:, None] * (x - prototypes)


def pairwise_sq_dists(X):
    """Dense m x m matrix of squared euclidean distances."""
    m = X.shape[0]
    out = np.empty((m, m))
    for i in range(m):
        out[i] = np.sum((X - X[i]) ** 2, axis=1)
        out[i, i] = 0.0
    return out
