"""Linear dimensionality reduction: PCA fitting and the affine map A x + b."""

from __future__ import annotations

import numpy as np

from .core import Projector, _freeze
from .errors import DataError, InputError


class LinearProjector(Projector):
    kind = "linear"

    def __init__(self, A, b):
        self.A = _freeze(np.atleast_2d(A))
        self.b = _freeze(np.atleast_1d(b))
        if self.A.shape[0] != self.b.shape[0]:
            raise InputError("A and b disagree on output dimension")
        self.d_out, self.d = self.A.shape

    def project(self, x):
        return self.A @ x + self.b

    def to_json_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist()}

    @staticmethod
    def from_json_dict(obj):
        return LinearProjector(np.asarray(obj["A"]), np.asarray(obj["b"]))


def fit_pca(X, d_out: int) -> LinearProjector:
    """PCA via SVD of the centered data matrix.

    Component rows get a deterministic sign: the entry with the largest
    magnitude is made positive.
    """
    X = np.asarray(X, dtype=np.float64)
    m, d = X.shape
    if not (0 < d_out < d):
        raise InputError(f"d_out must be in (0, {d}), got {d_out}")
    if m <= d_out:
        raise InputError("need more samples than output dimensions")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(m, d) * np.finfo(np.float64).eps)) if s.size else 0
    if rank < d_out:
        raise DataError(f"data rank {rank} is below requested d_out={d_out}")
    A = vt[:d_out].copy()
    for i in range(d_out):
        j = int(np.argmax(np.abs(A[i])))
        if A[i, j] < 0:
            A[i] = -A[i]
    return LinearProjector(A, -A @ mean)


def project_linear(p: LinearProjector, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.d,):
        raise InputError(f"expected input of shape ({p.d},), got {x.shape}")
    return p.project(x)
