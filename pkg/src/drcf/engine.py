"""Method-specific computation of a single counterfactual plus the two
black-listing mechanisms (coordinate pinning for the convex programs, affine
remap for the gradient-based ones)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import CfRequest, Counterfactual, Projector, SolverOptions
from .errors import InfeasibleError, InputError, SolverError
from .linear import LinearProjector
from .neural import AutoencoderProjector, Mlp, PtsneProjector, mlp_forward, mlp_grad
from .solver import SmoothTerm, solve_l1_smooth
from .som import Som


class BlacklistMode(Enum):
    EQUALITY_CONSTRAINT = "equality_constraint"
    AFFINE_REMAP = "affine_remap"


@dataclass(frozen=True)
class BlacklistConstraint:
    F: tuple
    mode: BlacklistMode
    anchor: np.ndarray  # x_orig values at F

    @staticmethod
    def from_request(req: CfRequest, mode: BlacklistMode) -> "BlacklistConstraint":
        return BlacklistConstraint(
            F=req.blacklist, mode=mode, anchor=req.x_orig[list(req.blacklist)].copy()
        )


def apply_remap(bl: BlacklistConstraint, x) -> np.ndarray:
    """Overwrite black-listed coordinates with their anchor values."""
    if bl.mode is not BlacklistMode.AFFINE_REMAP:
        raise InputError("apply_remap requires AFFINE_REMAP mode")
    out = np.array(x, dtype=np.float64)
    for i, j in enumerate(bl.F):
        out[j] = bl.anchor[i]
    return out


def _split_free(req: CfRequest):
    d = req.x_orig.shape[0]
    fixed = np.array(sorted(req.blacklist), dtype=np.int64)
    free = np.array([j for j in range(d) if j not in req.blacklist], dtype=np.int64)
    return free, fixed


def _assemble(req: CfRequest, free, u) -> np.ndarray:
    x_cf = req.x_orig.copy()
    x_cf[free] = u
    return x_cf


def cf_linear(p: LinearProjector, req: CfRequest) -> Counterfactual:
    """Penalty form of the convex program: min ||x - x_cf||_1 + C ||A x_cf + b - y_cf||^2,
    with black-listed coordinates pinned exactly."""
    y_cf = np.asarray(req.y_cf, dtype=np.float64)
    if y_cf.shape != (p.d_out,):
        raise InputError(f"target must have shape ({p.d_out},)")
    free, fixed = _split_free(req)
    A_f = p.A[:, free]
    const = p.A[:, fixed] @ req.x_orig[fixed] + p.b - y_cf
    C = req.C

    def value(u):
        r = A_f @ u + const
        return C * float(r @ r)

    def gradient(u):
        return 2.0 * C * (A_f.T @ (A_f @ u + const))

    lip = 2.0 * C * (np.linalg.norm(A_f, 2) ** 2 if A_f.size else 1.0)
    u = solve_l1_smooth(
        SmoothTerm(value, gradient, max(lip, 1e-6)),
        req.x_orig[free],
        req.x_orig[free],
        req.opts,
    )
    return Counterfactual.build(req.x_orig, _assemble(req, free, u), p, y_cf, req.opts.change_tol)


def cf_som(s: Som, req: CfRequest) -> Counterfactual:
    """L1-closest point of the target cell's margin polytope, found by a
    hinge-penalty homotopy with post-hoc best-matching-unit verification."""
    t = s.index_to_flat(req.y_cf)
    target_idx = s.flat_to_index(t)
    eps = req.opts.som_margin
    P = s.prototypes
    others = np.array([z for z in range(P.shape[0]) if z != t], dtype=np.int64)
    G = 2.0 * (P[others] - P[t])
    h = np.sum(P[others] ** 2, axis=1) - float(P[t] @ P[t]) - eps

    free, fixed = _split_free(req)
    G_f = G[:, free]
    h_f = h - G[:, fixed] @ req.x_orig[fixed]

    feas_tol = 1e-9

    def feasible(u):
        return float(np.max(G_f @ u - h_f)) <= feas_tol

    def bmu_ok(u):
        return s.project(_assemble(req, free, u)) == target_idx

    u = req.x_orig[free].copy()
    if feasible(u) and bmu_ok(u):
        return Counterfactual.build(req.x_orig, _assemble(req, free, u), s, target_idx, req.opts.change_tol)

    gnorm2 = np.linalg.norm(G_f, 2) ** 2 if G_f.size else 1.0
    mu = 10.0
    best_u = u
    while mu <= 1e12:
        def value(v, _mu=mu):
            viol = np.maximum(G_f @ v - h_f, 0.0)
            return _mu * float(viol @ viol)

        def gradient(v, _mu=mu):
            viol = np.maximum(G_f @ v - h_f, 0.0)
            return 2.0 * _mu * (G_f.T @ viol)

        u = solve_l1_smooth(
            SmoothTerm(value, gradient, max(2.0 * mu * gnorm2, 1e-6)),
            u,
            req.x_orig[free],
            req.opts,
        )
        best_u = u
        if feasible(u) and bmu_ok(u):
            return Counterfactual.build(
                req.x_orig, _assemble(req, free, u), s, target_idx, req.opts.change_tol
            )
        mu *= 2.0

    # accept a tiny residual violation as long as the BMU check holds
    if bmu_ok(best_u):
        return Counterfactual.build(
            req.x_orig, _assemble(req, free, best_u), s, target_idx, req.opts.change_tol
        )
    raise InfeasibleError(
        f"target cell {target_idx} is unreachable with blacklist {req.blacklist}",
        best_x=_assemble(req, free, best_u),
    )


def cf_neural(net: Mlp, projector: Projector, req: CfRequest) -> Counterfactual:
    """Gradient-based penalty solve for differentiable projectors; the
    black-list is enforced by an affine remap inside the penalty term."""
    y_cf = np.asarray(req.y_cf, dtype=np.float64)
    if y_cf.shape != (net.d_out,):
        raise InputError(f"target must have shape ({net.d_out},)")
    bl = BlacklistConstraint.from_request(req, BlacklistMode.AFFINE_REMAP)
    blacklist = np.array(req.blacklist, dtype=np.int64)
    C = req.C
    kappa = req.opts.kappa

    def value(x):
        r = mlp_forward(net, apply_remap(bl, x)) - y_cf
        if not np.all(np.isfinite(r)):
            raise SolverError("network produced non-finite output")
        return C * float(np.sqrt(r @ r + kappa * kappa))

    def gradient(x):
        z = apply_remap(bl, x)
        r = mlp_forward(net, z) - y_cf
        s = np.sqrt(r @ r + kappa * kappa)
        _, gx = mlp_grad(net, z, C * r / s)
        if blacklist.size:
            gx[blacklist] = 0.0
        return gx

    x = solve_l1_smooth(SmoothTerm(value, gradient, 1.0), req.x_orig, req.x_orig, req.opts)
    x_cf = apply_remap(bl, x)
    # restore bit-exact anchors on coordinates the prox left untouched anyway
    return Counterfactual.build(req.x_orig, x_cf, projector, y_cf, req.opts.change_tol)


def compute_counterfactual(p: Projector, req: CfRequest) -> Counterfactual:
    """Dispatch to the variant-specific solver."""
    if req.x_orig.shape[0] != p.d:
        raise InputError(f"request dimension {req.x_orig.shape[0]} != projector d={p.d}")
    if isinstance(p, LinearProjector):
        return cf_linear(p, req)
    if isinstance(p, Som):
        return cf_som(p, req)
    if isinstance(p, (AutoencoderProjector, PtsneProjector)):
        return cf_neural(p.net(), p, req)
    raise InputError(f"unsupported projector kind {p.kind!r}")
