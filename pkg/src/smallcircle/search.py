"""Numerical zero search of the closure penalty over ``W``.

With ``Omega`` fixed to the gate's principal log and ``Z = 0`` the penalty
is a smooth nonnegative function of the ``k`` complex entries of ``W``.
:func:`minimize_penalty` drives it to zero with a derivative-free
Hooke-Jeeves pattern search over the real and imaginary parts, then tries
to identify the zero with one of the analytic families.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStart, DimensionError, NoConvergence
from .linalg import expm_antihermitian, frobenius_norm
from .manifold import _block_penalty
from .synthesis import TargetGate, family_norm

SEARCH_TOL = 1e-14
MIN_NORM = 0.1
CLASSIFY_TOL = 1e-6


def _assemble(target: TargetGate, w: np.ndarray) -> np.ndarray:
    k = target.k
    x = np.zeros((k + 1, k + 1), dtype=complex)
    x[:k, :k] = target.omega
    x[:k, k] = w
    x[k, :k] = -w.conj()
    return x


def _as_column(target: TargetGate, w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.shape not in ((target.k,), (target.k, 1)):
        raise DimensionError(f"W must be {target.k}x1, got shape {w.shape}")
    return w.reshape(-1)


def penalty_objective(target: TargetGate, w) -> float:
    """Closure penalty of ``X(W) = [[Omega, W], [-W^dagger, 0]]``."""
    w = _as_column(target, w)
    return float(_block_penalty(expm_antihermitian(_assemble(target, w)), target.k))


@dataclass
class SearchProblem:
    target: TargetGate
    w0: np.ndarray
    step: float = 0.5
    min_step: float = 1e-13
    max_evals: int = 50_000
    tol: float = SEARCH_TOL
    min_norm: float = MIN_NORM


@dataclass(eq=False)
class SearchResult:
    w: np.ndarray
    value: float
    evaluations: int
    converged: bool
    classified: tuple[int, int] | None = None  # (family, n) with n >= 1
    direction_residual: float | None = None
    norm_error: float | None = None
    # expm(X) is a multiple of the identity: closes the loop without being
    # one of the eigenvector families
    scalar_closure: bool = False

    @property
    def norm(self) -> float:
        return frobenius_norm(self.w)


def _to_real(w: np.ndarray) -> np.ndarray:
    return np.concatenate([w.real, w.imag])


def _to_complex(v: np.ndarray) -> np.ndarray:
    k = v.size // 2
    return v[:k] + 1j * v[k:]


def classify(target: TargetGate, w, tol: float = CLASSIFY_TOL
             ) -> tuple[tuple[int, int] | None, float, float]:
    """Match a zero ``W`` to a family ``(mu, n)``.

    Returns ``(label, direction_residual, norm_error)`` for the closest
    family; ``label`` is ``None`` when either residual exceeds ``tol``.
    """
    w = _as_column(target, w)
    r = frobenius_norm(w)
    d = w / r
    best = (None, math.inf, math.inf)
    for c in target.clusters:
        res = c.residual(d)
        # a(mu, n) grows like pi*n; a short scan over n is enough
        n_guess = max(1, round(r / math.pi))
        for n in range(max(1, n_guess - 2), n_guess + 3):
            err = abs(r - family_norm(c.phase, n))
            if max(res, err) < max(best[1], best[2]):
                best = ((c.index, n), res, err)
    label, res, err = best
    if res > tol or err > tol:
        label = None
    return label, res, err


def minimize_penalty(problem: SearchProblem) -> SearchResult:
    """Hooke-Jeeves pattern search for a zero of the penalty.

    Iterates with ``||W|| < min_norm`` are rejected, which keeps the search
    away from the trivial zero ``W = 0`` (a constant loop).  Raises
    :class:`NoConvergence` carrying the best iterate if the penalty does not
    reach ``tol``.
    """
    target = problem.target
    w0 = _as_column(target, problem.w0)
    if frobenius_norm(w0) == 0.0:
        raise DegenerateStart("W = 0 is the constant loop; start elsewhere")
    if frobenius_norm(w0) < problem.min_norm:
        raise DegenerateStart(f"start lies inside the barrier ||W|| < {problem.min_norm}")

    evals = 0

    def f(v: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        w = _to_complex(v)
        if frobenius_norm(w) < problem.min_norm:
            return math.inf
        return penalty_objective(target, w)

    def explore(base: np.ndarray, fbase: float, h: float) -> tuple[np.ndarray, float]:
        x = base.copy()
        fx = fbase
        for i in range(x.size):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sign * h
                ft = f(trial)
                if ft < fx:
                    x, fx = trial, ft
                    break
        return x, fx

    x = _to_real(w0)
    fx = f(x)
    h = problem.step
    while fx > problem.tol and h >= problem.min_step and evals < problem.max_evals:
        y, fy = explore(x, fx, h)
        if fy < fx:
            # pattern moves: keep extrapolating while exploration keeps improving
            while True:
                jump = y + (y - x)
                x, fx = y, fy
                if evals >= problem.max_evals:
                    break
                z, fz = explore(jump, f(jump), h)
                if fz < fx:
                    y, fy = z, fz
                else:
                    break
        else:
            h *= 0.5

    w = _to_complex(x)
    result = SearchResult(w, fx, evals, fx <= problem.tol)
    if not result.converged:
        raise NoConvergence(
            f"penalty {fx:.3e} above {problem.tol:.1e} after {evals} evaluations", result)
    result.classified, result.direction_residual, result.norm_error = classify(target, w)
    result.scalar_closure = is_scalar_closure(target, w)
    return result


def is_scalar_closure(target: TargetGate, w, tol: float = 1e-6) -> bool:
    """True when ``expm(X(W))`` is proportional to the identity."""
    e = expm_antihermitian(_assemble(target, _as_column(target, w)))
    scale = np.trace(e) / e.shape[0]
    return frobenius_norm(e - scale * np.eye(e.shape[0])) <= tol


def _search_or_best(problem: SearchProblem) -> SearchResult:
    try:
        return minimize_penalty(problem)
    except NoConvergence as exc:
        return exc.result


def multistart(target: TargetGate, starts, workers: int = 1, **settings) -> list[SearchResult]:
    """Run :func:`minimize_penalty` from each start; failures are kept, unconverged.

    With ``workers > 1`` the independent searches run in a process pool.
    Results come back in the order of ``starts`` either way.
    """
    problems = [SearchProblem(target, np.asarray(w0), **settings) for w0 in starts]
    if workers <= 1 or len(problems) <= 1:
        return [_search_or_best(p) for p in problems]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_search_or_best, problems))


def random_starts(k: int, count: int, r_min: float, r_max: float,
                  rng: np.random.Generator) -> list[np.ndarray]:
    """Starts with uniformly random norm in ``[r_min, r_max]`` and Gaussian direction."""
    out = []
    for _ in range(count):
        r = rng.uniform(r_min, r_max)
        v = rng.normal(size=k) + 1j * rng.normal(size=k)
        out.append(r * v / np.linalg.norm(v))
    return out


def scan_penalty_ray(target: TargetGate, direction, r_max: float, samples: int
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Penalty along ``W = r * direction`` for ``r`` on a uniform grid of ``[0, r_max]``."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    d = _as_column(target, direction)
    radii = np.linspace(0.0, r_max, samples)
    values = np.array([penalty_objective(target, r * d) for r in radii])
    return radii, values


def ray_zeros(target: TargetGate, direction, r_max: float, samples: int,
              zero_tol: float = 1e-12) -> list[float]:
    """Interior zeros of the ray scan, refined by bounded 1-D minimisation."""
    from scipy.optimize import minimize_scalar

    d = _as_column(target, direction)
    radii, values = scan_penalty_ray(target, d, r_max, samples)
    zeros = []
    for i in range(1, samples - 1):
        if values[i] < values[i - 1] and values[i] <= values[i + 1]:
            res = minimize_scalar(lambda r: penalty_objective(target, r * d),
                                  bounds=(radii[i - 1], radii[i + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun <= zero_tol:
                zeros.append(float(res.x))
    return zeros
