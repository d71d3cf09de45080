"""Stiefel frames, Grassmann points and small-circle loops.

A control matrix ``X`` (anti-Hermitian, ``N x N``) generates the frame curve
``V(t) = expm(t X) V0`` and the loop ``P(t) = V(t) V(t)^dagger`` on the
Grassmannian of ``k``-planes in ``C^N``.  The loop closes exactly when the
off-diagonal ``k x (N-k)`` block of ``expm(X)`` vanishes, which is what
:func:`penalty` measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DimensionError, InvalidFrame, NotAntiHermitian
from .linalg import (
    HERMITIAN_TOL,
    _antihermitian_spectrum,
    antihermitian_defect,
    as_matrix,
    dagger,
    expm_antihermitian,
    frobenius_norm,
)

FRAME_TOL = 1e-10
ZERO_TOL = 1e-9
DEFAULT_SAMPLES = 1001


@dataclass(frozen=True)
class StiefelFrame:
    """An orthonormal ``k``-frame in ``C^N`` (``V^dagger V = I_k``)."""

    V: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.V, "V")
        n, k = v.shape
        if not 1 <= k < n:
            raise DimensionError(f"frame must satisfy 1 <= k < N, got N={n}, k={k}")
        defect = frobenius_norm(dagger(v) @ v - np.eye(k))
        if defect > FRAME_TOL:
            raise InvalidFrame(f"columns are not orthonormal (defect {defect:.3e})")
        object.__setattr__(self, "V", v)

    @property
    def N(self) -> int:
        return self.V.shape[0]

    @property
    def k(self) -> int:
        return self.V.shape[1]


@dataclass(frozen=True)
class GrassmannPoint:
    """A rank-``k`` orthogonal projector on ``C^N``."""

    P: np.ndarray
    k: int

    def __post_init__(self):
        p = as_matrix(self.P, "P")
        if p.shape[0] != p.shape[1]:
            raise DimensionError(f"projector must be square, got {p.shape}")
        object.__setattr__(self, "P", p)

    @property
    def N(self) -> int:
        return self.P.shape[0]

    def defects(self) -> tuple[float, float, float]:
        """(idempotency, hermiticity, trace) defects."""
        p = self.P
        return (frobenius_norm(p @ p - p), frobenius_norm(p - dagger(p)),
                abs(np.trace(p).real - self.k) + abs(np.trace(p).imag))

    def is_valid(self, tol: float = FRAME_TOL) -> bool:
        return max(self.defects()) <= tol


@dataclass(frozen=True, eq=False)
class ControlMatrix:
    """Block anti-Hermitian control ``X = [[Omega, W], [-W^dagger, Z]]``.

    ``family`` is the 1-based cluster index a synthesized solution was built
    from and ``winding`` its winding number; both are ``None`` for matrices
    read from elsewhere.
    """

    omega: np.ndarray
    w: np.ndarray
    z: np.ndarray
    family: int | None = None
    winding: int | None = None
    theta: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        omega = as_matrix(self.omega, "Omega")
        w = as_matrix(self.w, "W")
        z = as_matrix(self.z, "Z")
        k, m = w.shape
        if omega.shape != (k, k) or z.shape != (m, m):
            raise DimensionError(
                f"inconsistent blocks: Omega {omega.shape}, W {w.shape}, Z {z.shape}")
        for name, block in (("Omega", omega), ("Z", z)):
            if antihermitian_defect(block) > HERMITIAN_TOL * max(1.0, frobenius_norm(block)):
                raise NotAntiHermitian(f"{name} block is not anti-Hermitian")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z", z)

    @classmethod
    def from_matrix(cls, x, k: int, **kwargs) -> "ControlMatrix":
        x = as_matrix(x, "X")
        n = x.shape[0]
        if x.shape != (n, n):
            raise DimensionError(f"X must be square, got {x.shape}")
        if not 1 <= k < n:
            raise DimensionError(f"need 1 <= k < N, got N={n}, k={k}")
        if antihermitian_defect(x) > HERMITIAN_TOL * max(1.0, frobenius_norm(x)):
            raise NotAntiHermitian(
                f"X is not anti-Hermitian (defect {antihermitian_defect(x):.3e})")
        return cls(x[:k, :k], x[:k, k:], x[k:, k:], **kwargs)

    @property
    def k(self) -> int:
        return self.omega.shape[0]

    @property
    def N(self) -> int:
        return self.k + self.z.shape[0]

    @cached_property
    def matrix(self) -> np.ndarray:
        k = self.k
        x = np.zeros((self.N, self.N), dtype=complex)
        x[:k, :k] = self.omega
        x[:k, k:] = self.w
        x[k:, :k] = -dagger(self.w)
        x[k:, k:] = self.z
        return x

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """``(lam, Q)`` with ``X = Q diag(1j*lam) Q^dagger``."""
        return _antihermitian_spectrum(self.matrix)

    def propagator(self, t: float | np.ndarray) -> np.ndarray:
        """``expm(t X)``; a stack of matrices when ``t`` is an array."""
        lam, q = self.spectrum
        t = np.asarray(t, dtype=float)
        phases = np.exp(1j * np.multiply.outer(t, lam))
        return np.einsum("ij,...j,kj->...ik", q, phases, q.conj())

    def scaled(self, t: float) -> "ControlMatrix":
        return ControlMatrix(t * self.omega, t * self.w, t * self.z,
                             self.family, self.winding, self.theta, dict(self.meta))

    @property
    def is_degenerate(self) -> bool:
        """True for ``W = 0``: the loop is the constant curve at ``P0``."""
        return frobenius_norm(self.w) == 0.0


def reference_frame(N: int, k: int) -> StiefelFrame:
    """``V0``: the identity ``k x k`` block stacked over zeros."""
    if not 1 <= k < N:
        raise DimensionError(f"need 1 <= k < N, got N={N}, k={k}")
    return StiefelFrame(np.eye(N, k, dtype=complex))


def project(frame: StiefelFrame) -> GrassmannPoint:
    """Bundle projection ``V -> V V^dagger``."""
    if not isinstance(frame, StiefelFrame):
        frame = StiefelFrame(frame)
    v = frame.V
    return GrassmannPoint(v @ dagger(v), frame.k)


def act_left(g, frame: StiefelFrame) -> StiefelFrame:
    return StiefelFrame(as_matrix(g, "g") @ frame.V)


def act_right(frame: StiefelFrame, h) -> StiefelFrame:
    return StiefelFrame(frame.V @ as_matrix(h, "h"))


def loop_point(x: ControlMatrix, t: float) -> GrassmannPoint:
    """``P(t) = expm(tX) P0 expm(-tX)``."""
    v = expm_antihermitian(t * x.matrix)[:, :x.k]
    return GrassmannPoint(v @ dagger(v), x.k)


def _block_penalty(e: np.ndarray, k: int) -> np.ndarray:
    block = e[..., :k, k:]
    return np.sum(block.real ** 2 + block.imag ** 2, axis=(-2, -1))


def penalty(x: ControlMatrix) -> float:
    """Sum of ``|<i| expm(X) |j>|^2`` over ``i <= k < j``; zero iff the loop closes."""
    return float(_block_penalty(expm_antihermitian(x.matrix), x.k))


def penalty_trace(x: ControlMatrix, times) -> np.ndarray:
    """``penalty(t X)`` for each ``t`` in ``times``, from one decomposition of ``X``."""
    return _block_penalty(x.propagator(np.asarray(times, dtype=float)), x.k)


def loop_speed(x: ControlMatrix) -> float:
    """``||W||_F``; loop length on the Grassmannian is proportional to it."""
    return frobenius_norm(x.w)


@dataclass(frozen=True)
class WindingProfile:
    times: np.ndarray
    penalties: np.ndarray
    zeros: tuple[float, ...]
    degenerate: bool

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.penalties.tolist()))

    @property
    def zero_count(self) -> int | None:
        """Number of interior returns to ``P0``; ``None`` for a constant loop."""
        return None if self.degenerate else len(self.zeros)

    @property
    def winding(self) -> int | None:
        return None if self.degenerate else len(self.zeros) + 1


def winding_profile(x: ControlMatrix, samples: int = DEFAULT_SAMPLES,
                    zero_tol: float = ZERO_TOL) -> WindingProfile:
    """Sample the penalty along the loop and locate its interior zeros.

    A grid point that is a strict local minimum is refined by bounded 1-D
    minimisation over its two neighbouring cells; it counts as a return to
    ``P0`` when the refined penalty is below ``zero_tol``.  Zeros that fall
    between grid points (e.g. ``t = 1/3``) are therefore still found.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    times = np.linspace(0.0, 1.0, samples)
    values = penalty_trace(x, times)
    if x.is_degenerate:
        return WindingProfile(times, values, (), True)
    zeros = []
    for i in range(1, samples - 1):
        if not (values[i] < values[i - 1] and values[i] <= values[i + 1]):
            continue
        if values[i] <= zero_tol * 1e-6:
            zeros.append(float(times[i]))
            continue
        res = minimize_scalar(lambda s: float(penalty_trace(x, s)),
                              bounds=(times[i - 1], times[i + 1]), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun <= zero_tol:
            zeros.append(float(res.x))
    return WindingProfile(times, values, tuple(zeros), False)
