"""Target gates and reference small-circle solutions for them.

Explicit control matrices for the Hadamard, CNOT and two-qubit DFT
gates are stored as builder functions of the winding ``n``, the phase
``theta`` and, for degenerate eigenvalues, the coefficients of the direction
inside the eigenspace.  Builders are entry-by-entry transcriptions and are
deliberately not written in terms of the synthesis code they are checked
against.

Two remarks on the reference matrices:

* CNOT and DFT2 use phase ``-pi`` for the eigenvalue -1 in their ``Omega``
  block (Hadamard uses ``+pi``).  Fixtures record this as
  ``minus_one_phase`` so the synthesis side can reproduce them exactly.
* The bottom row of the DFT2 second-family matrix carries ``1/sqrt(2)``,
  the value anti-Hermiticity and the family norm both require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import FixtureMismatch
from .holonomy import holonomy_exact
from .linalg import antihermitian_defect, frobenius_norm, unitarity_defect
from .manifold import ControlMatrix, penalty
from .synthesis import analyze_gate, build_solution, family_norm

PI = math.pi
S8 = math.sin(PI / 8)
C8 = math.cos(PI / 8)
R2 = 1 / math.sqrt(2)


def a_n(n: int) -> float:
    return math.sqrt(4 * n * n - 1) / 2


def g_n(n: int) -> float:
    return math.sqrt(16 * n * n - 1) / 4


U_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
U_CNOT = np.array([[1, 0, 0, 0],
                   [0, 1, 0, 0],
                   [0, 0, 0, 1],
                   [0, 0, 1, 0]], dtype=complex)
U_DFT2 = 0.5 * np.array([[1, 1, 1, 1],
                         [1, 1j, -1, -1j],
                         [1, -1, 1, -1],
                         [1, -1j, -1, 1j]], dtype=complex)
U_IDENTITY2 = np.eye(2, dtype=complex)
U_PAULIZ = np.diag([1.0, -1.0]).astype(complex)


Builder = Callable[..., np.ndarray]


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """One reference family.

    ``basis`` columns span the directions the family's coefficients refer
    to; ``signed`` marks families whose ``W`` is written proportional to
    ``n`` itself (so ``-n`` equals ``+n`` with ``theta`` shifted by pi).
    """

    label: str
    phase: float
    build: Builder  # (n, theta, coeffs) -> X
    basis: np.ndarray
    default_coeffs: tuple[complex, ...]
    expected_norm: Callable[[int], float]
    signed: bool = False
    eigenpairs: Callable[[int, float], list[tuple[complex, np.ndarray]]] | None = None

    def direction(self, coeffs: Sequence[complex] | None = None) -> np.ndarray:
        c = np.asarray(self.default_coeffs if coeffs is None else coeffs, dtype=complex)
        return self.basis @ c

    def control(self, n: int = 1, theta: float = 0.0, coeffs=None) -> ControlMatrix:
        k = self.basis.shape[0]
        return ControlMatrix.from_matrix(self.build(n, theta, coeffs), k)


@dataclass(frozen=True, eq=False)
class GateFixture:
    name: str
    U: np.ndarray
    solutions: tuple[ReferenceSolution, ...] = ()
    # family index (synthesis ordering) -> closed-form ||W||(n)
    expected_norms: dict[int, Callable[[int], float]] = field(default_factory=dict)
    minus_one_phase: float = PI
    description: str = ""

    def solution(self, family: int) -> ReferenceSolution:
        return self.solutions[family - 1]


def _assemble(diag_block: np.ndarray, column: np.ndarray, row: np.ndarray) -> np.ndarray:
    """``1j*pi`` times the bordered matrix ``[[diag_block, column], [row, 0]]``."""
    k = diag_block.shape[0]
    m = np.zeros((k + 1, k + 1), dtype=complex)
    m[:k, :k] = diag_block
    m[:k, k] = column
    m[k, :k] = row
    return 1j * PI * m


# Hadamard -----------------------------------------------------------------

_OMEGA_H = np.array([[S8 ** 2, -S8 * C8],
                     [-S8 * C8, C8 ** 2]])


def hadamard_family1(n: int = 1, theta: float = 0.0, coeffs=None) -> np.ndarray:
    e = np.exp(1j * theta)
    return _assemble(_OMEGA_H,
                     np.array([n * e * C8, n * e * S8]),
                     np.array([n * np.conj(e) * C8, n * np.conj(e) * S8]))


def hadamard_family2(n: int = 1, theta: float = 0.0, coeffs=None) -> np.ndarray:
    e = np.exp(1j * theta)
    a = a_n(n)
    return _assemble(_OMEGA_H,
                     np.array([-a * e * S8, a * e * C8]),
                     np.array([-a * np.conj(e) * S8, a * np.conj(e) * C8]))


def _hadamard_eigen1(n: int, theta: float):
    e = np.exp(1j * theta)
    return [(1j * PI, np.array([-S8, C8, 0])),
            (1j * n * PI, np.array([e * C8, e * S8, 1]) * R2),
            (-1j * n * PI, np.array([e * C8, e * S8, -1]) * R2)]


def _hadamard_eigen2(n: int, theta: float):
    # the zero-eigenvalue vector keeps its 1/sqrt(2) prefactor, so it is not unit length
    e = np.exp(1j * theta)
    b = math.sqrt((2 * n + 1) / (4 * n))
    c = math.sqrt((2 * n - 1) / (4 * n))
    return [(0.0, np.array([C8, S8, 0]) * R2),
            (1j * PI * (n + 0.5), np.array([-b * e * S8, b * e * C8, c])),
            (1j * PI * (-n + 0.5), np.array([-c * e * S8, c * e * C8, -b]))]


# CNOT ---------------------------------------------------------------------

_OMEGA_CNOT = np.array([[0, 0, 0, 0],
                        [0, 0, 0, 0],
                        [0, 0, -0.5, 0.5],
                        [0, 0, 0.5, -0.5]], dtype=complex)


def cnot_family1(n: int = 1, theta: float = 0.0, coeffs=(1, 0, 0)) -> np.ndarray:
    """``coeffs[j] = d_j exp(1j*theta_j)`` with ``sum |d_j|^2 = 1``."""
    if coeffs is None:
        coeffs = (1, 0, 0)
    e = np.exp(1j * theta)
    c1, c2, c3 = (complex(c) * e for c in coeffs)
    col = np.array([n * c1, n * c2, R2 * n * c3, R2 * n * c3])
    row = np.array([n * c1.conjugate(), n * c2.conjugate(),
                    R2 * n * c3.conjugate(), R2 * n * c3.conjugate()])
    return _assemble(_OMEGA_CNOT, col, row)


def cnot_family2(n: int = 1, theta: float = 0.0, coeffs=None) -> np.ndarray:
    e = np.exp(1j * theta)
    a = a_n(n)
    col = np.array([0, 0, -R2 * a * e, R2 * a * e])
    row = np.array([0, 0, -R2 * a * np.conj(e), R2 * a * np.conj(e)])
    return _assemble(_OMEGA_CNOT, col, row)


# DFT2 ---------------------------------------------------------------------

_OMEGA_DFT2 = np.array([[-0.25, 0.25, 0.25, 0.25],
                        [0.25, -0.5, -0.25, 0],
                        [0.25, -0.25, -0.25, -0.25],
                        [0.25, 0, -0.25, -0.5]], dtype=complex)


def dft2_family1(n: int = 1, theta: float = 0.0, coeffs=(1, 0)) -> np.ndarray:
    """``coeffs = (f1 exp(1j*theta1), f2 exp(1j*theta2))`` with ``f1^2 + f2^2 = 1``."""
    if coeffs is None:
        coeffs = (1, 0)
    e = np.exp(1j * theta)
    p1, p2 = (complex(c) * e for c in coeffs)
    w1 = 0.5 * p1 + R2 * p2
    w2 = w4 = 0.5 * p1
    w3 = -0.5 * p1 + R2 * p2
    w = np.array([w1, w2, w3, w4])
    return _assemble(_OMEGA_DFT2, n * w, n * w.conj())


def dft2_family2(n: int = 1, theta: float = 0.0, coeffs=None) -> np.ndarray:
    e = np.exp(1j * theta)
    g = g_n(n)
    col = np.array([0, -R2 * g * e, 0, R2 * g * e])
    row = np.array([0, -R2 * g * np.conj(e), 0, R2 * g * np.conj(e)])
    return _assemble(_OMEGA_DFT2, col, row)


def dft2_family3(n: int = 1, theta: float = 0.0, coeffs=None) -> np.ndarray:
    e = np.exp(1j * theta)
    a = a_n(n)
    col = 0.5 * a * e * np.array([-1, 1, 1, 1])
    row = 0.5 * a * np.conj(e) * np.array([-1, 1, 1, 1])
    return _assemble(_OMEGA_DFT2, col, row)


def _norm_linear(n: int) -> float:
    return PI * abs(n)


def _norm_half(n: int) -> float:
    return PI / 2 * math.sqrt(4 * n * n - 1)


def _norm_quarter(n: int) -> float:
    return PI * math.sqrt(16 * n * n - 1) / 4


def _col(*v) -> np.ndarray:
    return np.array(v, dtype=complex)[:, None]


_CNOT1_BASIS = np.array([[1, 0, 0], [0, 1, 0], [0, 0, R2], [0, 0, R2]], dtype=complex)
_DFT2_1_BASIS = np.array([[0.5, R2], [0.5, 0], [-0.5, R2], [0.5, 0]], dtype=complex)


def catalog() -> tuple[GateFixture, ...]:
    hadamard = GateFixture(
        "hadamard", U_HADAMARD,
        (ReferenceSolution("H1", 0.0, hadamard_family1, _col(C8, S8), (1,), _norm_linear,
                           signed=True, eigenpairs=_hadamard_eigen1),
         ReferenceSolution("H2", PI, hadamard_family2, _col(-S8, C8), (1,), _norm_half,
                           eigenpairs=_hadamard_eigen2)),
        {1: _norm_linear, 2: _norm_half}, PI, "Hadamard gate")
    cnot = GateFixture(
        "cnot", U_CNOT,
        (ReferenceSolution("CNOT1", 0.0, cnot_family1, _CNOT1_BASIS, (1, 0, 0), _norm_linear,
                           signed=True),
         ReferenceSolution("CNOT2", -PI, cnot_family2, _col(0, 0, -R2, R2), (1,), _norm_half)),
        {1: _norm_linear, 2: _norm_half}, -PI, "controlled NOT, control on the first qubit")
    dft2 = GateFixture(
        "dft2", U_DFT2,
        (ReferenceSolution("DFT2-1", 0.0, dft2_family1, _DFT2_1_BASIS, (1, 0), _norm_linear,
                           signed=True),
         ReferenceSolution("DFT2-2", -PI / 2, dft2_family2, _col(0, -R2, 0, R2), (1,),
                           _norm_quarter),
         ReferenceSolution("DFT2-3", -PI, dft2_family3, _col(-0.5, 0.5, 0.5, 0.5), (1,),
                           _norm_half)),
        {1: _norm_linear, 2: _norm_quarter, 3: _norm_half}, -PI,
        "two-qubit discrete Fourier transform")
    identity2 = GateFixture("identity2", U_IDENTITY2, (), {1: _norm_linear}, PI, "2x2 identity")
    pauliz = GateFixture("pauliz", U_PAULIZ, (), {1: _norm_linear, 2: _norm_half}, PI, "Pauli Z")
    return (hadamard, cnot, dft2, identity2, pauliz)


def get_fixture(name: str) -> GateFixture:
    for fx in catalog():
        if fx.name == name:
            return fx
    raise KeyError(name)


def gate_names() -> list[str]:
    return [fx.name for fx in catalog()]


def synthesis_counterpart(fixture: GateFixture, family: int, n: int = 1, theta: float = 0.0,
                          coeffs=None) -> ControlMatrix:
    """The synthesized matrix that should equal ``solution.build(n, theta, coeffs)``."""
    sol = fixture.solution(family)
    target = analyze_gate(fixture.U, minus_one_phase=fixture.minus_one_phase)
    mu = target.cluster_for_phase(sol.phase).index
    if sol.signed and n < 0:
        theta = theta + PI
    return build_solution(target, mu, sol.direction(coeffs), n, theta)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tol


@dataclass
class CrosscheckReport:
    fixture: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tol: float) -> None:
        self.checks.append(Check(name, float(value), tol))


def fixture_crosscheck(fixture: GateFixture, windings: Sequence[int] = (1, 2)) -> CrosscheckReport:
    """Verify every reference family of ``fixture`` against the synthesis code.

    Raises :class:`FixtureMismatch` naming the first failing check.
    """
    rep = CrosscheckReport(fixture.name)
    rep.add("U unitary", unitarity_defect(fixture.U), 1e-12)
    for sol in fixture.solutions:
        for n in windings:
            tag = f"{sol.label} n={n}"
            x = sol.control(n)
            rep.add(f"{tag} anti-Hermitian", antihermitian_defect(x.matrix), 1e-12)
            rep.add(f"{tag} Z = 0", frobenius_norm(x.z), 0.0)
            p = penalty(x)
            rep.add(f"{tag} penalty", p, 1e-15)
            u = holonomy_exact(x, closure_tol=max(p, 1e-15)).U
            rep.add(f"{tag} holonomy", frobenius_norm(u - fixture.U), 1e-9)
            rep.add(f"{tag} norm", abs(frobenius_norm(x.w) - sol.expected_norm(n)), 1e-10)
            synth = synthesis_counterpart(fixture, fixture.solutions.index(sol) + 1, n)
            rep.add(f"{tag} matches synthesis", np.abs(synth.matrix - x.matrix).max(), 1e-12)
            if sol.eigenpairs is not None:
                for j, (val, vec) in enumerate(sol.eigenpairs(n, 0.0), start=1):
                    res = frobenius_norm(x.matrix @ vec - val * vec)
                    rep.add(f"{tag} eigenpair {j}", res, 1e-10)
    target = analyze_gate(fixture.U)
    for mu, norm in fixture.expected_norms.items():
        for n in windings:
            x = build_solution(target, mu, n=n)
            rep.add(f"family {mu} n={n} synthesized norm",
                    abs(frobenius_norm(x.w) - norm(n)), 1e-10)
    if len(target.clusters) != len(fixture.expected_norms):
        rep.add("family count", abs(len(target.clusters) - len(fixture.expected_norms)), 0)
    for c in rep.checks:
        if not c.passed:
            raise FixtureMismatch(f"{fixture.name}: {c.name} = {c.value:.3e} > {c.tol:.1e}")
    return rep


__all__ = [
    "GateFixture", "ReferenceSolution", "catalog", "get_fixture", "gate_names",
    "fixture_crosscheck", "synthesis_counterpart", "family_norm",
]
