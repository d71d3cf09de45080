"""Dense complex linear algebra for small matrices.

Everything here is built on a cyclic Jacobi eigensolver for complex Hermitian
matrices.  Matrices in this package are tiny (N <= 8 in practice), so the
solver favours robustness and auditability over speed.

Sign convention: the eigenvalues of a unitary ``U`` are written
``exp(-1j * omega)`` with ``omega`` in ``(-pi, pi]``, and the principal
logarithm ``Omega`` satisfies ``U = expm(-Omega)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotAntiHermitian, NotHermitian, NotUnitary

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
MINUS_ONE_TOL = 1e-10
CLUSTER_TOL = 1e-8
JACOBI_MAX_SWEEPS = 60

# Mixing weights used when separating a unitary into commuting Hermitian parts.
_MIXERS = (0.7548776662466927, 0.5698402909980532, 1.3247179572447460,
           0.4142135623730950, 1.7320508075688772, 0.2360679774997897)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T


@dataclass(frozen=True)
class PrincipalSpectrum:
    """Principal eigenphases of a unitary, grouped into degeneracy clusters.

    ``phases[j]`` and column ``vectors[:, j]`` satisfy
    ``U @ v = exp(-1j * phase) * v``.  ``clusters`` holds index arrays into
    those columns; phases inside one cluster are identical.
    """

    phases: np.ndarray
    vectors: np.ndarray
    clusters: tuple[np.ndarray, ...]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _square(a, name: str) -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frobenius_norm(m) -> float:
    m = np.asarray(m, dtype=complex)
    return math.sqrt(float(np.vdot(m, m).real))


def hermitian_defect(m: np.ndarray) -> float:
    return frobenius_norm(m - dagger(m))


def antihermitian_defect(m: np.ndarray) -> float:
    return frobenius_norm(m + dagger(m))


def unitarity_defect(u: np.ndarray) -> float:
    """||U^dagger U - I||_F."""
    return frobenius_norm(dagger(u) @ u - np.eye(u.shape[1]))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    try:
        m = _square(u, "U")
    except (DimensionError, ValueError):
        return False
    return unitarity_defect(m) <= tol


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a Hermitian matrix; returns unsorted (eigenvalues, Q)."""
    n = a.shape[0]
    a = 0.5 * (a + dagger(a))
    q = np.eye(n, dtype=complex)
    scale = frobenius_norm(a)
    if n == 1 or scale == 0.0:
        return a.diagonal().real.copy(), q
    threshold = 4.0 * n * np.finfo(float).eps * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = frobenius_norm(a - np.diag(a.diagonal()))
        if off <= threshold:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                mod = abs(apr)
                if mod <= 1e-300:
                    continue
                phase = apr / mod
                app = a[p, p].real
                arr = a[r, r].real
                # Real rotation diagonalising [[app, mod], [mod, arr]].
                tau = (arr - app) / (2.0 * mod)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(phase, 1) @ [[c, s], [-s, c]]
                j00, j01, j10, j11 = phase * c, phase * s, -s, c
                colp = a[:, p].copy()
                colr = a[:, r]
                a[:, p] = colp * j00 + colr * j10
                a[:, r] = colp * j01 + colr * j11
                rowp = a[p, :].copy()
                rowr = a[r, :]
                a[p, :] = np.conj(j00) * rowp + np.conj(j10) * rowr
                a[r, :] = np.conj(j01) * rowp + np.conj(j11) * rowr
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = app - t * mod
                a[r, r] = arr + t * mod
                qp = q[:, p].copy()
                qr = q[:, r]
                q[:, p] = qp * j00 + qr * j10
                q[:, r] = qp * j01 + qr * j11
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return a.diagonal().real.copy(), q


def hermitian_eig(h) -> SpectralDecomposition:
    """Eigendecomposition of a complex Hermitian matrix.

    Eigenvalues are returned in ascending order with orthonormal eigenvectors
    as the columns of ``eigenvectors``.

    Raises
    ------
    DimensionMismatch
        If ``h`` is not square.
    NotHermitian
        If ``||H - H^dagger||_F > 1e-12 * max(1, ||H||_F)``.
    """
    m = _square(h, "H")
    if hermitian_defect(m) > HERMITIAN_TOL * max(1.0, frobenius_norm(m)):
        raise NotHermitian(f"matrix is not Hermitian (defect {hermitian_defect(m):.3e})")
    w, q = _jacobi(m)
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], q[:, order])


def _antihermitian_spectrum(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real ``lam`` and unitary ``Q`` with ``X = Q diag(1j*lam) Q^dagger``."""
    if antihermitian_defect(x) > HERMITIAN_TOL * max(1.0, frobenius_norm(x)):
        raise NotAntiHermitian(
            f"matrix is not anti-Hermitian (defect {antihermitian_defect(x):.3e})")
    dec = hermitian_eig(-1j * x)
    return dec.eigenvalues, dec.eigenvectors


def antihermitian_eig(x) -> SpectralDecomposition:
    """Eigendecomposition of an anti-Hermitian matrix (purely imaginary eigenvalues)."""
    lam, q = _antihermitian_spectrum(_square(x, "X"))
    return SpectralDecomposition(1j * lam, q)


def expm_antihermitian(x) -> np.ndarray:
    """Matrix exponential of an anti-Hermitian matrix via its spectral decomposition."""
    lam, q = _antihermitian_spectrum(_square(x, "X"))
    return (q * np.exp(1j * lam)) @ dagger(q)


def gram_schmidt(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormalise the columns of ``vectors``, dropping dependent ones."""
    basis: list[np.ndarray] = []
    for v in np.asarray(vectors, dtype=complex).T:
        w = v.copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for b in basis:
                w = w - np.vdot(b, w) * b
        norm = frobenius_norm(w)
        if norm > tol:
            basis.append(w / norm)
    if not basis:
        return np.zeros((np.shape(vectors)[0], 0), dtype=complex)
    return np.column_stack(basis)


def _split_invariant(u: np.ndarray, basis: np.ndarray, depth: int) -> list[np.ndarray]:
    """Eigenvector columns of ``u`` restricted to the invariant subspace ``basis``."""
    m = basis.shape[1]
    uc = dagger(basis) @ u @ basis
    if m == 1:
        return [basis[:, 0]]
    mean = np.trace(uc) / m
    if frobenius_norm(uc - mean * np.eye(m)) <= 1e-12 * m or depth >= len(_MIXERS):
        return [basis[:, j] for j in range(m)]
    alpha = _MIXERS[depth]
    h = 0.5 * (uc + dagger(uc)) + alpha * (uc - dagger(uc)) / 2j
    dec = hermitian_eig(h)
    vecs = basis @ dec.eigenvectors
    out: list[np.ndarray] = []
    start = 0
    w = dec.eigenvalues
    for j in range(1, m + 1):
        if j == m or w[j] - w[j - 1] > 1e-6:
            group = vecs[:, start:j]
            if group.shape[1] == 1:
                out.append(group[:, 0])
            else:
                out.extend(_split_invariant(u, gram_schmidt(group), depth + 1))
            start = j
    return out


def unitary_eig(u) -> SpectralDecomposition:
    """Eigendecomposition of a unitary matrix.

    The unitary is split into the commuting Hermitian parts
    ``(U + U^dagger)/2`` and ``(U - U^dagger)/2i``; a generic real combination
    of the two is diagonalised, and any near-degenerate group is refined
    recursively with a different combination.  Eigenvalues are the Rayleigh
    quotients, projected onto the unit circle.
    """
    m = _square(u, "U")
    defect = unitarity_defect(m)
    if defect > UNITARY_TOL:
        raise NotUnitary(f"matrix is not unitary: ||U^dagger U - I||_F = {defect:.3e}", defect)
    n = m.shape[0]
    cols = _split_invariant(m, np.eye(n, dtype=complex), 0)
    q = np.column_stack(cols)
    lam = np.einsum("ij,ij->j", q.conj(), m @ q)
    lam = lam / np.abs(lam)
    return SpectralDecomposition(lam, q)


def principal_phase(lam: complex, minus_one_phase: float = math.pi) -> float:
    """Phase ``omega`` in (-pi, pi] with ``lam = exp(-1j*omega)``; -1 maps to +pi.

    ``minus_one_phase=-math.pi`` selects the other side of the cut for the
    eigenvalue -1 only.
    """
    if abs(lam + 1.0) <= MINUS_ONE_TOL:
        return minus_one_phase
    if abs(lam - 1.0) <= MINUS_ONE_TOL:
        return 0.0
    omega = -math.atan2(lam.imag, lam.real)
    if omega <= -math.pi:
        omega += 2.0 * math.pi
    return omega


def principal_spectrum(u, cluster_tol: float = CLUSTER_TOL,
                       minus_one_phase: float = math.pi) -> PrincipalSpectrum:
    """Principal eigenphases of ``u`` with degenerate eigenvalues clustered.

    Eigenvalues closer than ``cluster_tol`` on the complex plane form one
    cluster; the cluster shares a single phase (from its mean eigenvalue) and
    its eigenvectors are re-orthonormalised.
    """
    if minus_one_phase not in (math.pi, -math.pi):
        raise ValueError("minus_one_phase must be +pi or -pi")
    dec = unitary_eig(u)
    lam = dec.eigenvalues
    q = dec.eigenvectors
    n = lam.size
    # single-linkage clustering on the unit circle
    label = list(range(n))

    def find(i: int) -> int:
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= cluster_tol:
                label[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    phases = np.empty(n)
    vectors = np.empty_like(q)
    clusters: list[tuple[float, list[int]]] = []
    for members in groups.values():
        mean = lam[members].mean()
        phase = principal_phase(mean / abs(mean), minus_one_phase)
        clusters.append((phase, members))
    clusters.sort(key=lambda c: c[0])
    col = 0
    index_groups = []
    for phase, members in clusters:
        block = gram_schmidt(q[:, members]) if len(members) > 1 else q[:, members]
        width = block.shape[1]
        vectors[:, col:col + width] = block
        phases[col:col + width] = phase
        index_groups.append(np.arange(col, col + width))
        col += width
    return PrincipalSpectrum(phases, vectors, tuple(index_groups))


def unitary_log_principal(u) -> np.ndarray:
    """Anti-Hermitian ``Omega`` with ``expm(-Omega) = U`` and eigenphases in (-pi, pi]."""
    spec = principal_spectrum(u)
    q = spec.vectors
    return (q * (1j * spec.phases)) @ dagger(q)
