"""L1 + smooth composite solver shared by all counterfactual programs.

Minimizes ``||x - x_orig||_1 + g(x)`` with proximal gradient steps, a
backtracking line search on the smooth part and Nesterov acceleration with
objective-based restart (accepted iterates are monotone in the composite
objective).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import SolverOptions, l1_norm
from .errors import SolverError


@dataclass(frozen=True)
class SmoothTerm:
    """Differentiable part of a counterfactual objective."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    lipschitz: float = 1.0


def prox_l1(v, t, anchor=None):
    """Soft-thresholding toward ``anchor`` (the prox of ``||. - anchor||_1``)."""
    v = np.asarray(v, dtype=np.float64)
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if anchor is None:
        anchor = np.zeros_like(v)
    u = v - anchor
    return anchor + np.sign(u) * np.maximum(np.abs(u) - t, 0.0)


def solve_l1_smooth(
    smooth: SmoothTerm, x0, x_orig, opts: SolverOptions | None = None, trace=None
) -> np.ndarray:
    """Minimize ``||x - x_orig||_1 + smooth(x)``; returns the best iterate.

    ``trace``, if given, is a list the accepted composite objective values are
    appended to.
    """
    if opts is None:
        opts = SolverOptions()
    x_orig = np.asarray(x_orig, dtype=np.float64)
    x = np.asarray(x0, dtype=np.float64).copy()

    def composite(z):
        return l1_norm(z - x_orig) + smooth.value(z)

    L = max(smooth.lipschitz, 1e-12)
    fx = composite(x)
    if not np.isfinite(fx):
        raise SolverError("objective not finite at the starting point", best_x=x)
    best_x, best_f = x.copy(), fx
    if trace is not None:
        trace.append(fx)

    y = x.copy()  # extrapolated point
    theta = 1.0
    for it in range(opts.max_iter):
        gy = smooth.value(y)
        grad = smooth.gradient(y)
        # backtracking on the smooth majorizer around y
        for _ in range(100):
            cand = prox_l1(y - grad / L, 1.0 / L, anchor=x_orig)
            diff = cand - y
            gc = smooth.value(cand)
            if gc <= gy + grad @ diff + 0.5 * L * (diff @ diff) + 1e-12:
                break
            L *= 2.0
        f_cand = gc + l1_norm(cand - x_orig)
        if not np.isfinite(f_cand):
            raise SolverError(f"objective became non-finite at iteration {it}", best_x=best_x)

        if f_cand > fx + 1e-12 and not np.allclose(y, x):
            # momentum overshoot: restart from the last accepted iterate
            y = x.copy()
            theta = 1.0
            continue

        x_new = cand
        theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
        y = x_new + ((theta - 1.0) / theta_new) * (x_new - x)
        theta = theta_new

        decrease = fx - f_cand
        x, fx = x_new, f_cand
        if trace is not None:
            trace.append(fx)
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if decrease < opts.tol_obj:
            break
    return best_x
