"""Shared domain types: datasets, the projector abstraction, counterfactual
containers and small vector helpers.

All types are immutable after construction; arrays are marked read-only so
instances can safely be shared across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InputError

DEFAULT_CHANGE_TOL = 1e-6


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def l1_norm(v) -> float:
    return float(np.sum(np.abs(v)))


def l2_norm(v) -> float:
    return float(np.sqrt(np.sum(np.asarray(v, dtype=np.float64) ** 2)))


def l0_count(v, tol: float) -> int:
    """Number of entries with magnitude strictly above ``tol``."""
    return int(np.sum(np.abs(v) > tol))


@dataclass(frozen=True)
class Dataset:
    """Standardized sample matrix with labels and feature names.

    ``mean_`` / ``std_`` record the per-feature statistics (population std)
    used for standardization, so raw-space round trips remain possible.
    """

    X: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    mean_: np.ndarray
    std_: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", _freeze(self.X))
        lab = np.ascontiguousarray(self.labels, dtype=np.int64)
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "mean_", _freeze(self.mean_))
        object.__setattr__(self, "std_", _freeze(self.std_))
        m, d = self.X.shape
        if d < 1 or m < 2:
            raise InputError(f"dataset needs m >= 2 and d >= 1, got {m}x{d}")
        if not np.all(np.isfinite(self.X)):
            raise InputError("dataset contains NaN/Inf entries")
        if self.labels.shape != (m,):
            raise InputError("labels must have one entry per sample")
        if len(self.feature_names) != d:
            raise InputError("feature_names must have one entry per feature")
        col_mean = self.X.mean(axis=0)
        col_std = self.X.std(axis=0)
        if np.max(np.abs(col_mean)) > 1e-9 or np.max(np.abs(col_std - 1.0)) > 1e-9:
            raise InputError("dataset is not standardized (|mean|<=1e-9, |std-1|<=1e-9)")

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @staticmethod
    def standardize(X_raw, labels, feature_names=None) -> "Dataset":
        """Standardize raw samples (population std) and wrap them up."""
        X_raw = np.asarray(X_raw, dtype=np.float64)
        if X_raw.ndim != 2:
            raise InputError("X must be a 2-D matrix")
        if not np.all(np.isfinite(X_raw)):
            raise InputError("raw data contains NaN/Inf entries")
        mean = X_raw.mean(axis=0)
        std = X_raw.std(axis=0)
        if np.any(std == 0.0):
            bad = [i for i in range(X_raw.shape[1]) if std[i] == 0.0]
            raise InputError(f"constant feature column(s) {bad} cannot be standardized")
        if feature_names is None:
            feature_names = tuple(f"f{i}" for i in range(X_raw.shape[1]))
        return Dataset(
            X=(X_raw - mean) / std,
            labels=np.asarray(labels),
            feature_names=tuple(feature_names),
            mean_=mean,
            std_=std,
        )

    def to_raw(self, x):
        return np.asarray(x) * self.std_ + self.mean_

    def to_json_dict(self) -> dict:
        return {
            "X": self.X.tolist(),
            "labels": self.labels.tolist(),
            "feature_names": list(self.feature_names),
            "mean": self.mean_.tolist(),
            "std": self.std_.tolist(),
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "Dataset":
        return Dataset(
            X=np.asarray(obj["X"], dtype=np.float64),
            labels=np.asarray(obj["labels"], dtype=np.int64),
            feature_names=tuple(obj["feature_names"]),
            mean_=np.asarray(obj["mean"], dtype=np.float64),
            std_=np.asarray(obj["std"], dtype=np.float64),
        )


class Projector:
    """A fitted dimensionality-reduction map from R^d to R^d' (or, for the
    SOM variant, to a grid index)."""

    kind: str = "abstract"
    d: int
    d_out: int

    def project(self, x: np.ndarray):
        raise NotImplementedError

    def target_distance(self, y_a, y_b) -> float:
        """Distance between two outputs of the map (overridden by SOM)."""
        return l2_norm(np.asarray(y_a, dtype=np.float64) - np.asarray(y_b, dtype=np.float64))

    def to_json_dict(self) -> dict:
        raise NotImplementedError


def project(p: Projector, x):
    """Apply a fitted projector; SOM variants return a grid index."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.d,):
        raise InputError(f"expected input of shape ({p.d},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("input contains NaN/Inf entries")
    return p.project(x)


@dataclass(frozen=True)
class SolverOptions:
    tol_obj: float = 1e-8
    max_iter: int = 5000
    change_tol: float = DEFAULT_CHANGE_TOL
    som_margin: float = 1e-3
    kappa: float = 1e-8

    def to_json_dict(self) -> dict:
        return {
            "tol_obj": self.tol_obj,
            "max_iter": self.max_iter,
            "change_tol": self.change_tol,
            "som_margin": self.som_margin,
            "kappa": self.kappa,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "SolverOptions":
        return SolverOptions(**obj)


@dataclass(frozen=True)
class CfRequest:
    """One counterfactual query: original sample, target location, black-list
    F of frozen features, and regularization strength C."""

    x_orig: np.ndarray
    y_cf: object  # ndarray for continuous projectors, (row, col) for SOM
    blacklist: tuple = ()
    C: float = 1.0
    opts: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "x_orig", _freeze(self.x_orig))
        bl = tuple(int(j) for j in self.blacklist)
        object.__setattr__(self, "blacklist", bl)
        d = self.x_orig.shape[0]
        if len(set(bl)) != len(bl):
            raise InputError("blacklist contains duplicate feature indices")
        if any(j < 0 or j >= d for j in bl):
            raise InputError("blacklist index out of range")
        if len(bl) >= d:
            raise InputError("blacklist must leave at least one free feature")
        if not self.C > 0:
            raise InputError("C must be positive")

    def with_blacklist(self, blacklist) -> "CfRequest":
        return replace(self, blacklist=tuple(blacklist))


@dataclass(frozen=True)
class Counterfactual:
    x_cf: np.ndarray
    delta: np.ndarray
    y_achieved: object
    map_error: float
    changed_features: tuple

    @staticmethod
    def build(x_orig, x_cf, projector: Projector, y_cf, change_tol=DEFAULT_CHANGE_TOL) -> "Counterfactual":
        x_cf = np.asarray(x_cf, dtype=np.float64)
        delta = x_cf - x_orig
        y_achieved = project(projector, x_cf)
        return Counterfactual(
            x_cf=_freeze(x_cf),
            delta=_freeze(delta),
            y_achieved=y_achieved,
            map_error=projector.target_distance(y_achieved, y_cf),
            changed_features=tuple(int(j) for j in np.flatnonzero(np.abs(delta) > change_tol)),
        )

    def to_json_dict(self) -> dict:
        y = self.y_achieved
        return {
            "x_cf": self.x_cf.tolist(),
            "delta": self.delta.tolist(),
            "y_achieved": list(y) if isinstance(y, tuple) else np.asarray(y).tolist(),
            "map_error": self.map_error,
            "changed_features": list(self.changed_features),
        }


@dataclass(frozen=True)
class ExplanationSet:
    """k diverse counterfactuals for one request plus the pairwise overlap
    matrix (0 off-diagonal means fully disjoint changed-feature sets)."""

    request: CfRequest
    members: tuple
    pairwise_div: np.ndarray
    shortfall: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        pd = np.ascontiguousarray(self.pairwise_div, dtype=np.int64)
        pd.flags.writeable = False
        object.__setattr__(self, "pairwise_div", pd)

    @property
    def k(self) -> int:
        return len(self.members)

    def to_json_dict(self) -> dict:
        y = self.request.y_cf
        return {
            "y_cf": list(y) if isinstance(y, tuple) else np.asarray(y).tolist(),
            "blacklist": list(self.request.blacklist),
            "C": self.request.C,
            "members": [cf.to_json_dict() for cf in self.members],
            "pairwise_div": self.pairwise_div.tolist(),
            "shortfall": self.shortfall,
        }
