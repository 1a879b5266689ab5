"""Self-organizing map: classic online Kohonen training and best-matching-unit
projection onto the grid index set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Projector, _freeze
from .errors import InputError

# Final values of the exponentially decayed training schedule.
LR_END = 0.01
SIGMA_END = 0.5


@dataclass(frozen=True)
class SomMeta:
    epochs: int
    lr0: float
    radius0: float
    seed: int


class Som(Projector):
    """Grid of prototypes; projection returns the (row, col) index of the
    closest prototype, ties broken by the lexicographically smallest index."""

    kind = "som"

    def __init__(self, prototypes, shape, meta: SomMeta | None = None):
        self.prototypes = _freeze(np.atleast_2d(prototypes))
        self.shape = (int(shape[0]), int(shape[1]))
        h, w = self.shape
        if h * w < 2:
            raise InputError("SOM grid needs at least 2 cells")
        if self.prototypes.shape[0] != h * w:
            raise InputError("prototype count does not match grid shape")
        if not np.all(np.isfinite(self.prototypes)):
            raise InputError("prototypes contain NaN/Inf")
        self.meta = meta
        self.d = self.prototypes.shape[1]
        self.d_out = 2

    def grid_coords(self) -> np.ndarray:
        """(H*W, 2) array of grid indices in row-major order."""
        h, w = self.shape
        rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
        return np.stack([rr.ravel(), cc.ravel()], axis=1).astype(np.float64)

    def flat_to_index(self, z: int) -> tuple:
        return (z // self.shape[1], z % self.shape[1])

    def index_to_flat(self, idx) -> int:
        r, c = int(idx[0]), int(idx[1])
        h, w = self.shape
        if not (0 <= r < h and 0 <= c < w):
            raise InputError(f"grid index {(r, c)} outside {self.shape}")
        return r * w + c

    def project(self, x):
        return self.flat_to_index(kernels.bmu_index(self.prototypes, x))

    def target_distance(self, y_a, y_b) -> float:
        dr = float(y_a[0]) - float(y_b[0])
        dc = float(y_a[1]) - float(y_b[1])
        return float(np.hypot(dr, dc))

    def to_json_dict(self):
        meta = None
        if self.meta is not None:
            meta = {
                "epochs": self.meta.epochs,
                "lr0": self.meta.lr0,
                "radius0": self.meta.radius0,
                "seed": self.meta.seed,
            }
        return {
            "kind": self.kind,
            "shape": list(self.shape),
            "prototypes": self.prototypes.tolist(),
            "meta": meta,
        }

    @staticmethod
    def from_json_dict(obj):
        meta = SomMeta(**obj["meta"]) if obj.get("meta") else None
        return Som(np.asarray(obj["prototypes"]), tuple(obj["shape"]), meta)


def fit_som(X, H, W, epochs=20, lr0=0.5, radius0=None, seed=0) -> Som:
    """Online SOM training with a Gaussian neighborhood and exponential decay
    of learning rate and radius down to (0.01, 0.5)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InputError("X must be a nonempty 2-D matrix")
    if H * W < 2:
        raise InputError("grid must have at least 2 cells")
    if epochs < 1:
        raise InputError("epochs must be >= 1")
    if radius0 is None:
        radius0 = max(H, W) / 2.0
    if lr0 <= 0 or radius0 <= 0:
        raise InputError("lr0 and radius0 must be positive")

    m = X.shape[0]
    rng = np.random.default_rng(seed)
    prototypes = X[rng.integers(0, m, size=H * W)].copy()

    steps = epochs * m
    order = np.concatenate([rng.permutation(m) for _ in range(epochs)])
    frac = np.arange(steps) / max(steps - 1, 1)
    lrs = lr0 * (LR_END / lr0) ** frac
    sigmas = radius0 * (SIGMA_END / radius0) ** frac

    som = Som(np.zeros((H * W, X.shape[1])), (H, W))  # for grid coords only
    kernels.som_train_steps(X, prototypes, som.grid_coords(), order, lrs, sigmas)
    return Som(prototypes, (H, W), SomMeta(epochs, lr0, float(radius0), seed))


def project_som(s: Som, x) -> tuple:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (s.d,):
        raise InputError(f"expected input of shape ({s.d},), got {x.shape}")
    return s.project(x)
