"""Inverse problem: closed small circles whose holonomy is a given gate.

For a ``k x k`` gate with principal log ``Omega`` the control lives on
``N = k + 1``.  Picking a unit eigenvector ``u`` of the gate with eigenphase
``omega`` and a winding ``n != 0``, the matrix

    X = [[Omega, W], [-W^dagger, 0]],   W = 1j * a * exp(1j*theta) * u,
    a = sqrt((2*pi*n + omega) * (2*pi*n - omega)) / 2,

closes the loop and has holonomy ``U``.  Loop length scales with
``||W||_F = a``, so the shortest loop uses ``|n| = 1`` and the eigenphase of
largest modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, InvalidDirection, VerificationError, ZeroWinding
from .holonomy import holonomy_exact
from .linalg import (
    as_matrix,
    dagger,
    frobenius_norm,
    gram_schmidt,
    principal_spectrum,
)
from .manifold import ControlMatrix, loop_speed, penalty, winding_profile

DIRECTION_TOL = 1e-10
PENALTY_TOL = 1e-18
HOLONOMY_TOL = 1e-9
DEFAULT_N_MAX = 3


@dataclass(frozen=True, eq=False)
class Cluster:
    """One eigenvalue of the gate: its principal phase and eigenspace basis."""

    index: int  # 1-based family label
    phase: float
    basis: np.ndarray  # k x m, orthonormal columns

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    @property
    def canonical_direction(self) -> np.ndarray:
        return self.basis[:, 0]

    def residual(self, direction: np.ndarray) -> float:
        """Distance of ``direction`` from this eigenspace."""
        return frobenius_norm(direction - self.projector @ direction)


@dataclass(frozen=True, eq=False)
class TargetGate:
    U: np.ndarray
    omega: np.ndarray  # principal log, U = expm(-omega)
    clusters: tuple[Cluster, ...]

    @property
    def k(self) -> int:
        return self.U.shape[0]

    def cluster(self, mu: int) -> Cluster:
        if not 1 <= mu <= len(self.clusters):
            raise IndexError(f"cluster index {mu} out of range 1..{len(self.clusters)}")
        return self.clusters[mu - 1]

    def cluster_for_phase(self, phase: float, tol: float = 1e-8) -> Cluster:
        for c in self.clusters:
            if abs(c.phase - phase) <= tol:
                return c
        raise KeyError(f"no eigenphase {phase}")


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its last component of maximal modulus is real positive."""
    mags = np.abs(v)
    j = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[-1])
    return v * (abs(v[j]) / v[j])


def _canonical_basis(vectors: np.ndarray) -> np.ndarray:
    """Basis of ``span(vectors)`` from projected standard basis vectors.

    Independent of whatever basis the eigensolver happened to return, so
    directions are reproducible.
    """
    proj = vectors @ dagger(vectors)
    basis = gram_schmidt(proj, tol=1e-6)[:, :vectors.shape[1]]
    return np.column_stack([_fix_phase(basis[:, j]) for j in range(basis.shape[1])])


def analyze_gate(u, minus_one_phase: float = math.pi) -> TargetGate:
    """Principal eigen-data of a gate, one :class:`Cluster` per distinct eigenvalue.

    Clusters are ordered by ``(|omega|, omega)``, which reproduces the family
    numbering used for the Hadamard, CNOT and DFT2 examples.  The eigenvalue
    -1 gets phase +pi unless ``minus_one_phase=-math.pi`` is passed; both
    choices give valid families with identical norms.
    """
    u = as_matrix(u, "U")
    spec = principal_spectrum(u, minus_one_phase=minus_one_phase)
    groups = sorted(spec.clusters, key=lambda g: (abs(spec.phases[g[0]]), spec.phases[g[0]]))
    clusters = []
    omega = np.zeros_like(u)
    for i, g in enumerate(groups, start=1):
        phase = float(spec.phases[g[0]])
        basis = _canonical_basis(spec.vectors[:, g])
        clusters.append(Cluster(i, phase, basis))
        omega += 1j * phase * (basis @ dagger(basis))
    return TargetGate(u, omega, tuple(clusters))


def family_norm(phase: float, n: int) -> float:
    """``||W||`` of the winding-``n`` member built on eigenphase ``phase``."""
    radicand = (2 * math.pi * n + phase) * (2 * math.pi * n - phase)
    if radicand <= 0:
        raise ValueError(f"radicand {radicand} not positive for n={n}, phase={phase}")
    return 0.5 * math.sqrt(radicand)


def build_solution(target: TargetGate, mu: int, direction=None, n: int = 1,
                   theta: float = 0.0) -> ControlMatrix:
    """Control matrix of family ``mu`` with winding ``n``.

    ``direction`` defaults to the cluster's canonical unit vector; any unit
    vector in the eigenspace is allowed.  ``theta`` is the free overall phase
    of ``W``.
    """
    if int(n) != n or n == 0:
        raise ZeroWinding(f"winding must be a nonzero integer, got {n}")
    n = int(n)
    cluster = target.cluster(mu)
    if direction is None:
        d = cluster.canonical_direction
    else:
        d = np.asarray(direction, dtype=complex).reshape(-1)
        if d.shape != (target.k,):
            raise InvalidDirection(f"direction must have length {target.k}")
        if abs(frobenius_norm(d) - 1.0) > DIRECTION_TOL:
            raise InvalidDirection(f"direction must be a unit vector (norm {frobenius_norm(d)})")
        if cluster.residual(d) > DIRECTION_TOL:
            raise InvalidDirection(
                f"direction is not in the eigenspace of cluster {mu} "
                f"(residual {cluster.residual(d):.2e})")
    a = family_norm(cluster.phase, n)
    w = (1j * a * np.exp(1j * theta)) * d
    return ControlMatrix(target.omega, w[:, None], np.zeros((1, 1), dtype=complex),
                         family=mu, winding=n, theta=float(theta))


@dataclass(frozen=True)
class Verification:
    penalty: float
    holonomy_error: float
    winding_zero_count: int | None


def verify_member(target: TargetGate, x: ControlMatrix) -> Verification:
    p = penalty(x)
    err = frobenius_norm(holonomy_exact(x, closure_tol=max(PENALTY_TOL, p)).U - target.U)
    return Verification(p, err, winding_profile(x).zero_count)


@dataclass(eq=False)
class SolutionFamily:
    mu: int
    omega: float
    direction: np.ndarray
    members: dict[int, ControlMatrix] = field(default_factory=dict)
    checks: dict[int, Verification] = field(default_factory=dict)

    def norm(self, n: int) -> float:
        return loop_speed(self.members[n])


def enumerate_families(target: TargetGate, n_max: int = DEFAULT_N_MAX,
                       directions: dict[int, np.ndarray] | None = None,
                       theta: float = 0.0, verify: bool = True) -> list[SolutionFamily]:
    """One family per eigencluster, members ``n = +-1, ..., +-n_max``.

    Every member is checked for closure and holonomy; a failed check raises
    :class:`VerificationError`.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    directions = directions or {}
    families = []
    for cluster in target.clusters:
        d = directions.get(cluster.index)
        fam = SolutionFamily(cluster.index, cluster.phase,
                             cluster.canonical_direction if d is None else np.asarray(d))
        for m in range(1, n_max + 1):
            for n in (m, -m):
                x = build_solution(target, cluster.index, d, n, theta)
                fam.members[n] = x
                if verify:
                    v = verify_member(target, x)
                    if v.penalty > PENALTY_TOL or v.holonomy_error > HOLONOMY_TOL:
                        raise VerificationError(
                            f"family {cluster.index}, n={n}: penalty {v.penalty:.2e}, "
                            f"holonomy error {v.holonomy_error:.2e}")
                    fam.checks[n] = v
        families.append(fam)
    return families


def optimal_member(families: list[SolutionFamily], rel_tol: float = 1e-12
                   ) -> tuple[SolutionFamily, int]:
    """``(family, n)`` of the shortest loop.

    Ties within ``rel_tol`` prefer the larger ``|omega|``, then ``n > 0``,
    then the lower family index.
    """
    candidates = [(fam.norm(n), fam, n) for fam in families for n in fam.members]
    if not candidates:
        raise EmptyInput("no solution members to choose from")
    best = min(c[0] for c in candidates)
    close = [c for c in candidates if c[0] <= best * (1 + rel_tol) + rel_tol]
    close.sort(key=lambda c: (-abs(c[1].omega), c[2] < 0, c[1].mu))
    _, fam, n = close[0]
    return fam, n


def optimal_solution(families: list[SolutionFamily]) -> ControlMatrix:
    fam, n = optimal_member(families)
    return fam.members[n]
