"""Diverse counterfactual sets: black-list growth, the pairwise overlap
measure, the model-agnostic training-sample baseline and the outlier
attribution aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CfRequest,
    Counterfactual,
    Dataset,
    ExplanationSet,
    Projector,
    l1_norm,
    project,
)
from .engine import compute_counterfactual
from .errors import InfeasibleError, InputError, SolverError


def diversity(cf_a: Counterfactual, cf_b: Counterfactual, change_tol: float = 1e-6) -> int:
    """Number of features changed by both counterfactuals (0 = fully diverse)."""
    if cf_a.delta.shape != cf_b.delta.shape:
        raise InputError("counterfactuals have different dimensions")
    return int(np.sum((np.abs(cf_a.delta) > change_tol) & (np.abs(cf_b.delta) > change_tol)))


def _pairwise_div(members, change_tol) -> np.ndarray:
    k = len(members)
    out = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = diversity(members[i], members[j], change_tol)
    return out


def diverse_counterfactuals(req: CfRequest, k: int, p: Projector) -> ExplanationSet:
    """Sequentially compute k counterfactuals, black-listing every feature
    changed by earlier ones so the changed-feature sets are disjoint.

    Returns fewer members (with ``shortfall=True``) when a later iteration is
    infeasible or the black-list would cover all but one feature.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    d = req.x_orig.shape[0]
    tol = req.opts.change_tol
    F = list(req.blacklist)
    members = []
    shortfall = False
    for i in range(k):
        if len(F) >= d - 1 and i > 0:
            shortfall = True
            break
        try:
            cf = compute_counterfactual(p, req.with_blacklist(F))
        except (InfeasibleError, SolverError):
            if i == 0:
                raise
            shortfall = True
            break
        members.append(cf)
        F.extend(j for j in cf.changed_features if j not in F)
    return ExplanationSet(req, tuple(members), _pairwise_div(members, tol), shortfall)


@dataclass(frozen=True)
class BaselineWeights:
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0

    def __post_init__(self):
        if not (self.C1 > 0 and self.C2 > 0 and self.C3 > 0):
            raise InputError("baseline weights must be positive")


def model_agnostic_diverse(
    req: CfRequest, k: int, data: Dataset, w: BaselineWeights, p: Projector
) -> ExplanationSet:
    """Greedy selection of k training samples minimizing a weighted sum of
    closeness, map error and overlap with already selected members."""
    if k < 1:
        raise InputError("k must be >= 1")
    if k > data.m:
        raise InputError(f"k={k} exceeds dataset size m={data.m}")
    tol = req.opts.change_tol
    X = data.X
    candidates = [
        i for i in range(data.m) if not np.array_equal(X[i], req.x_orig)
    ]
    if len(candidates) < k:
        raise InputError("not enough distinct candidates in the dataset")

    closeness = {i: l1_norm(req.x_orig - X[i]) for i in candidates}
    map_err = {i: p.target_distance(project(p, X[i]), req.y_cf) for i in candidates}
    changed_mask = {i: np.abs(X[i] - req.x_orig) > tol for i in candidates}

    members = []
    chosen = set()
    for _ in range(k):
        best_i, best_score = None, np.inf
        for i in candidates:
            if i in chosen:
                continue
            overlap = sum(
                int(np.sum(changed_mask[i] & changed_mask[j])) for j in chosen
            )
            score = w.C1 * closeness[i] + w.C2 * map_err[i] + w.C3 * overlap
            if score < best_score - 1e-15:
                best_score, best_i = score, i
        chosen.add(best_i)
        members.append(Counterfactual.build(req.x_orig, X[best_i], p, req.y_cf, tol))
    return ExplanationSet(req, tuple(members), _pairwise_div(members, tol), False)


def aggregate_attribution(x_orig, targets, p: Projector, opts=None, C: float = 1.0):
    """Per-feature attribution: solve one counterfactual per target, sum the
    absolute suggested changes per feature and normalize to a unit total.

    Returns (weights, n_failed, uniform_fallback).
    """
    if len(targets) < 1:
        raise InputError("need at least one target")
    from .core import SolverOptions

    opts = opts or SolverOptions()
    x_orig = np.asarray(x_orig, dtype=np.float64)
    acc = np.zeros_like(x_orig)
    n_failed = 0
    for y_cf in targets:
        req = CfRequest(x_orig=x_orig, y_cf=y_cf, C=C, opts=opts)
        try:
            cf = compute_counterfactual(p, req)
        except (InfeasibleError, SolverError):
            n_failed += 1
            continue
        acc += np.abs(cf.delta)
    if n_failed == len(targets):
        raise SolverError("all attribution solves failed")
    total = float(acc.sum())
    if total == 0.0:
        return np.full(x_orig.shape, 1.0 / x_orig.shape[0]), n_failed, True
    return acc / total, n_failed, False
