"""Wilczek-Zee holonomy of small-circle loops.

Two independent routes are provided.  :func:`holonomy_exact` uses the closed
form ``expm(-Omega)`` that follows from the connection being constant along
``V(t) = expm(tX) V0``.  :func:`holonomy_path_ordered` never looks at
``Omega``: it samples the frame curve and multiplies the discrete transport
matrices ``V(t_{i+1})^dagger V(t_i)`` in path order, which converges to the
holonomy at first order in the step size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSteps, OpenLoop
from .linalg import dagger, expm_antihermitian, frobenius_norm, unitarity_defect
from .manifold import ControlMatrix, penalty

CLOSURE_TOL = 1e-9
MIN_STEPS = 10


@dataclass(frozen=True, eq=False)
class HolonomyResult:
    U: np.ndarray
    method: str  # "exact" or "path_ordered"
    steps: int | None
    residual: float  # ||U^dagger U - I||_F


def _require_closed(x: ControlMatrix, tol: float) -> None:
    p = penalty(x)
    if p > tol:
        raise OpenLoop(p, tol)


def holonomy_exact(x: ControlMatrix, closure_tol: float = CLOSURE_TOL) -> HolonomyResult:
    """Holonomy ``expm(-Omega)`` of the closed loop generated by ``x``."""
    _require_closed(x, closure_tol)
    u = expm_antihermitian(-x.omega)
    return HolonomyResult(u, "exact", None, unitarity_defect(u))


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[1] @ mats[0]`` by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            tail = mats[-1:]
            mats = mats[:-1]
        else:
            tail = None
        mats = mats[1::2] @ mats[0::2]
        if tail is not None:
            mats = np.concatenate([mats, tail])
    return mats[0]


def frame_curve(x: ControlMatrix, times) -> np.ndarray:
    """Stack of frames ``V(t) = expm(tX) V0``, shape ``(len(times), N, k)``."""
    return x.propagator(np.asarray(times, dtype=float))[..., :, :x.k]


def holonomy_path_ordered(x: ControlMatrix, steps: int,
                          closure_tol: float = CLOSURE_TOL) -> HolonomyResult:
    """Discrete parallel transport around the loop.

    Each factor ``V(t_{i+1})^dagger V(t_i) = I - A(t_i) dt + O(dt^2)`` is the
    one-step transport for the connection ``A = V^dagger dV``; factors are
    multiplied with later times on the left.  The product is not exactly
    unitary; its unitarity defect shrinks like ``1/steps`` and is reported
    as ``residual``.
    """
    if steps < MIN_STEPS:
        raise InsufficientSteps(f"steps must be >= {MIN_STEPS}, got {steps}")
    _require_closed(x, closure_tol)
    frames = frame_curve(x, np.linspace(0.0, 1.0, steps + 1))
    overlaps = np.einsum("tji,tjk->tik", frames[1:].conj(), frames[:-1])
    u = _ordered_product(overlaps)
    return HolonomyResult(u, "path_ordered", steps, unitarity_defect(u))


def connection_numeric(x: ControlMatrix, t: float, dt: float = 1e-5) -> np.ndarray:
    """Central-difference estimate of ``V(t)^dagger dV/dt``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if not 0.0 < dt <= 1e-4:
        raise ValueError(f"dt must lie in (0, 1e-4], got {dt}")
    k = x.k
    v = expm_antihermitian(t * x.matrix)[:, :k]
    vp = expm_antihermitian((t + dt) * x.matrix)[:, :k]
    vm = expm_antihermitian((t - dt) * x.matrix)[:, :k]
    return dagger(v) @ (vp - vm) / (2.0 * dt)


def holonomy_distance(a: HolonomyResult | np.ndarray, b: HolonomyResult | np.ndarray) -> float:
    ua = a.U if isinstance(a, HolonomyResult) else a
    ub = b.U if isinstance(b, HolonomyResult) else b
    return frobenius_norm(ua - ub)
