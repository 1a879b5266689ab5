"""numba-jitted versions of the hot kernels. See ``_numpy`` for semantics."""

import numpy as np
from numba import njit


@njit(cache=True)
def bmu_index(prototypes, x):
    best = 0
    best_d2 = np.inf
    for z in range(prototypes.shape[0]):
        d2 = 0.0
        for j in range(prototypes.shape[1]):
            diff = x[j] - prototypes[z, j]
            d2 += diff * diff
        if d2 < best_d2:
            best_d2 = d2
            best = z
    return best


@njit(cache=True)
def bmu_batch(prototypes, X):
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        out[i] = bmu_index(prototypes, X[i])
    return out


@njit(cache=True)
def som_train_steps(X, prototypes, grid_rc, order, lrs, sigmas):
    n, d = prototypes.shape
    for t in range(order.shape[0]):
        x = X[order[t]]
        bmu = bmu_index(prototypes, x)
        denom = 2.0 * sigmas[t] * sigmas[t]
        for z in range(n):
            gd2 = 0.0
            for a in range(grid_rc.shape[1]):
                gdiff = grid_rc[z, a] - grid_rc[bmu, a]
                gd2 += gdiff * gdiff
            w = lrs[t] * np.exp(-gd2 / denom)
            for j in range(d):
                prototypes[z, j] += w * (x[j] - prototypes[z, j])


@njit(cache=True)
def pairwise_sq_dists(X):
    m, d = X.shape
    out = np.empty((m, m))
    for i in range(m):
        out[i, i] = 0.0
        for j in range(i + 1, m):
            d2 = 0.0
            for a in range(d):
                diff = X[i, a] - X[j, a]
                d2 += diff * diff
            out[i, j] = d2
            out[j, i] = d2
    return out
