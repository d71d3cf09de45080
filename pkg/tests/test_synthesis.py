import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unit_vector, random_unitary
from smallcircle import gates
from smallcircle.errors import EmptyInput, InvalidDirection, ZeroWinding
from smallcircle.holonomy import holonomy_exact
from smallcircle.linalg import frobenius_norm
from smallcircle.manifold import penalty
from smallcircle.synthesis import (
    analyze_gate,
    build_solution,
    enumerate_families,
    family_norm,
    optimal_member,
    optimal_solution,
)

PI = math.pi


@pytest.mark.parametrize("name,phases,mults", [
    ("hadamard", [0.0, PI], [1, 1]),
    ("cnot", [0.0, PI], [3, 1]),
    ("dft2", [0.0, -PI / 2, PI], [2, 1, 1]),
    ("identity2", [0.0], [2]),
    ("pauliz", [0.0, PI], [1, 1]),
])
def test_cluster_order_and_multiplicity(name, phases, mults):
    target = analyze_gate(gates.get_fixture(name).U)
    assert [c.index for c in target.clusters] == list(range(1, len(phases) + 1))
    assert np.allclose([c.phase for c in target.clusters], phases, atol=1e-12)
    assert [c.multiplicity for c in target.clusters] == mults


def test_cnot_eigenspaces_match_lapack():
    target = analyze_gate(gates.U_CNOT)
    lam, vec = np.linalg.eig(gates.U_CNOT)
    for c in target.clusters:
        expected = np.exp(-1j * c.phase)
        cols = vec[:, np.abs(lam - expected) < 1e-9]
        q, _ = np.linalg.qr(cols)
        assert np.allclose(c.projector, q @ q.conj().T, atol=1e-12)


def test_dft2_second_family_direction_has_eigenvalue_i():
    d = gates.get_fixture("dft2").solution(2).direction()
    assert np.allclose(gates.U_DFT2 @ d, 1j * d, atol=1e-14)
    c = analyze_gate(gates.U_DFT2).cluster(2)
    assert c.phase == pytest.approx(-PI / 2)
    assert c.residual(d) < 1e-12


def test_canonical_directions_are_reproducible():
    target = analyze_gate(gates.U_HADAMARD)
    c8, s8 = math.cos(PI / 8), math.sin(PI / 8)
    assert np.allclose(target.cluster(1).canonical_direction, [c8, s8], atol=1e-14)
    assert np.allclose(target.cluster(2).canonical_direction, [-s8, c8], atol=1e-14)
    again = analyze_gate(gates.U_HADAMARD.copy())
    assert np.array_equal(again.cluster(2).basis, target.cluster(2).basis)


def test_principal_log_shares_eigenvectors():
    target = analyze_gate(gates.U_DFT2)
    assert frobenius_norm(target.omega @ gates.U_DFT2 - gates.U_DFT2 @ target.omega) < 1e-13


@pytest.mark.parametrize("phase,n,expected", [
    (0.0, 1, PI),
    (0.0, -3, 3 * PI),
    (PI, 1, PI / 2 * math.sqrt(3)),
    (PI, 2, PI / 2 * math.sqrt(15)),
    (-PI / 2, 1, PI * math.sqrt(15 / 16)),
])
def test_family_norm(phase, n, expected):
    assert family_norm(phase, n) == pytest.approx(expected, rel=1e-15)


def test_family_norm_rejects_nonpositive_radicand():
    with pytest.raises(ValueError):
        family_norm(0.0, 0)


def test_build_solution_argument_checks():
    target = analyze_gate(gates.U_HADAMARD)
    with pytest.raises(ZeroWinding):
        build_solution(target, 1, n=0)
    with pytest.raises(ZeroWinding):
        build_solution(target, 1, n=1.5)
    with pytest.raises(InvalidDirection):
        build_solution(target, 1, direction=[2.0, 0.0])
    with pytest.raises(InvalidDirection):
        build_solution(target, 1, direction=target.cluster(2).canonical_direction)
    with pytest.raises(InvalidDirection):
        build_solution(target, 1, direction=[1.0, 0.0, 0.0])
    with pytest.raises(IndexError):
        build_solution(target, 3)


def test_members_are_even_in_n():
    target = analyze_gate(gates.U_HADAMARD)
    for mu in (1, 2):
        assert np.array_equal(build_solution(target, mu, n=2).matrix,
                              build_solution(target, mu, n=-2).matrix)


@pytest.mark.parametrize("theta", np.linspace(-PI, PI, 7))
def test_theta_is_a_free_phase(theta):
    target = analyze_gate(gates.U_CNOT)
    x = build_solution(target, 2, n=1, theta=theta)
    assert penalty(x) < 1e-28
    assert frobenius_norm(x.w) == pytest.approx(PI / 2 * math.sqrt(3), rel=1e-14)
    assert frobenius_norm(holonomy_exact(x).U - gates.U_CNOT) < 1e-13


def test_enumerate_families_layout():
    fams = enumerate_families(analyze_gate(gates.U_DFT2), n_max=2)
    assert [f.mu for f in fams] == [1, 2, 3]
    for f in fams:
        assert sorted(f.members) == [-2, -1, 1, 2]
        assert all(v.winding_zero_count == abs(n) - 1 for n, v in f.checks.items())
    with pytest.raises(ValueError):
        enumerate_families(analyze_gate(gates.U_DFT2), n_max=0)


def test_enumerate_families_custom_direction(rng):
    target = analyze_gate(gates.U_CNOT)
    d = target.cluster(1).basis @ random_unit_vector(rng, 3)
    fams = enumerate_families(target, n_max=1, directions={1: d})
    assert np.allclose(fams[0].members[1].w[:, 0], 1j * PI * d)


@pytest.mark.parametrize("name,mu,n", [
    ("hadamard", 2, 1), ("cnot", 2, 1), ("dft2", 3, 1), ("identity2", 1, 1), ("pauliz", 2, 1),
])
def test_optimal_member(name, mu, n):
    fam, best = optimal_member(enumerate_families(analyze_gate(gates.get_fixture(name).U)))
    assert (fam.mu, best) == (mu, n)


def test_optimal_member_empty():
    with pytest.raises(EmptyInput):
        optimal_member([])


def test_conjugated_gate_keeps_family_norms():
    u = gates.U_DFT2
    v = random_unitary(4, seed=21)
    a = enumerate_families(analyze_gate(u), n_max=1)
    b = enumerate_families(analyze_gate(v @ u @ v.conj().T), n_max=1)
    assert [f.norm(1) for f in a] == pytest.approx([f.norm(1) for f in b], rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(1, 4), seed=st.integers(0, 2**31 - 1), theta=st.floats(-PI, PI))
def test_random_gate_members_close_with_correct_holonomy(k, seed, theta):
    u = random_unitary(k, seed=seed)
    target = analyze_gate(u)
    for fam in enumerate_families(target, n_max=2, theta=theta):
        for n, check in fam.checks.items():
            assert check.penalty <= 1e-18
            assert check.holonomy_error <= 1e-9
            assert fam.norm(n) == pytest.approx(family_norm(fam.omega, n), abs=1e-10)
    x = optimal_solution(enumerate_families(target, n_max=1))
    assert frobenius_norm(x.w) <= min(family_norm(c.phase, 1) for c in target.clusters) + 1e-12
