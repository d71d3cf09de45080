import math

import numpy as np
import pytest

from smallcircle import gates
from smallcircle.errors import DegenerateStart, DimensionError, NoConvergence
from smallcircle.manifold import penalty
from smallcircle.search import (
    SearchProblem,
    classify,
    is_scalar_closure,
    minimize_penalty,
    multistart,
    penalty_objective,
    random_starts,
    ray_zeros,
    scan_penalty_ray,
)
from smallcircle.synthesis import analyze_gate, build_solution, family_norm

PI = math.pi


@pytest.fixture(scope="module")
def hadamard():
    return analyze_gate(gates.U_HADAMARD)


def test_objective_agrees_with_control_penalty(hadamard):
    x = build_solution(hadamard, 2, n=1, theta=0.3)
    assert penalty_objective(hadamard, x.w[:, 0]) == pytest.approx(penalty(x), abs=1e-28)
    assert penalty_objective(hadamard, 1.05 * x.w[:, 0]) > 1e-3
    assert penalty_objective(hadamard, x.w) == penalty_objective(hadamard, x.w[:, 0])
    with pytest.raises(DimensionError):
        penalty_objective(hadamard, np.ones(3))


@pytest.mark.parametrize("mu,scale,expected,scalar", [
    (2, 2.5, (2, 1), False),
    (1, 3.1, (1, 1), True),  # e^X = -I for this member
])
def test_minimize_from_near_a_family(hadamard, mu, scale, expected, scalar):
    w0 = scale * hadamard.cluster(mu).canonical_direction
    res = minimize_penalty(SearchProblem(hadamard, w0))
    assert res.converged and res.value <= 1e-14
    assert res.classified == expected
    assert res.norm_error <= 1e-6
    assert res.norm == pytest.approx(family_norm(hadamard.cluster(mu).phase, 1), abs=1e-6)
    assert res.scalar_closure is scalar


def test_degenerate_starts_are_refused(hadamard):
    with pytest.raises(DegenerateStart):
        minimize_penalty(SearchProblem(hadamard, np.zeros(2)))
    with pytest.raises(DegenerateStart):
        minimize_penalty(SearchProblem(hadamard, np.array([0.05, 0.0])))


def test_no_convergence_carries_best_iterate(hadamard):
    problem = SearchProblem(hadamard, np.array([1.0, 1.0j]), max_evals=20)
    with pytest.raises(NoConvergence) as info:
        minimize_penalty(problem)
    res = info.value.result
    assert not res.converged
    assert res.value < penalty_objective(hadamard, problem.w0)


def test_classify_rejects_off_family_points(hadamard):
    w = 2.0 * np.array([1.0, 1.0j]) / math.sqrt(2)
    label, res, err = classify(hadamard, w)
    assert label is None
    assert max(res, err) > 1e-6
    x = build_solution(hadamard, 1, n=3, theta=1.0)
    assert classify(hadamard, x.w)[0] == (1, 3)


def test_scalar_closure_zero_exists():
    # e^X = exp(1j*pi/3) I for the Hadamard problem at ||W|| = pi*sqrt(11/3):
    # a closed loop with the right holonomy that is not an eigenvector family
    target = analyze_gate(gates.U_HADAMARD)
    starts = random_starts(2, 10, 0.5, 7.0, np.random.default_rng(0))
    results = [r for r in multistart(target, starts) if r.converged]
    assert results
    stray = [r for r in results if r.classified is None]
    assert stray
    for r in stray:
        assert r.scalar_closure
        assert r.norm == pytest.approx(PI * math.sqrt(11 / 3), abs=1e-6)


def test_is_scalar_closure_on_family_member(hadamard):
    assert not is_scalar_closure(hadamard, build_solution(hadamard, 2).w)


def test_multistart_keeps_failures(hadamard):
    out = multistart(hadamard, [np.array([1.0, 1.0j])], max_evals=10)
    assert len(out) == 1 and not out[0].converged


def test_scan_penalty_ray(hadamard):
    d = hadamard.cluster(1).canonical_direction
    radii, values = scan_penalty_ray(hadamard, d, 2 * PI, 3)
    assert radii.tolist() == [0.0, PI, 2 * PI]
    assert np.allclose(values, 0.0, atol=1e-26)
    with pytest.raises(ValueError):
        scan_penalty_ray(hadamard, d, 1.0, 1)


@pytest.mark.parametrize("mu", [1, 2])
def test_ray_zeros_are_family_norms(hadamard, mu):
    c = hadamard.cluster(mu)
    zeros = ray_zeros(hadamard, c.canonical_direction, 7.0, 701)
    expected = [family_norm(c.phase, n) for n in (1, 2) if family_norm(c.phase, n) < 7.0]
    assert zeros == pytest.approx(expected, abs=1e-6)


def test_multistart_workers_match_sequential(hadamard):
    starts = random_starts(2, 4, 0.5, 7.0, np.random.default_rng(3))
    serial = multistart(hadamard, starts)
    pooled = multistart(hadamard, starts, workers=2)
    for a, b in zip(serial, pooled):
        assert np.array_equal(a.w, b.w)
        assert a.classified == b.classified


def test_random_starts_norm_range():
    starts = random_starts(3, 50, 0.5, 7.0, np.random.default_rng(1))
    norms = [np.linalg.norm(w) for w in starts]
    assert len(starts) == 50 and all(w.shape == (3,) for w in starts)
    assert 0.5 <= min(norms) and max(norms) <= 7.0


def test_zero_w_is_a_degenerate_zero(hadamard):
    # e^X is block diagonal, so the objective vanishes although nothing moves
    assert penalty_objective(hadamard, np.zeros(2)) == 0.0


@pytest.mark.parametrize("phi", [0.3, 1.7, -2.5])
@pytest.mark.parametrize("mu", [1, 2])
def test_objective_phase_invariance_along_eigenvectors(hadamard, mu, phi):
    w = 1.3 * hadamard.cluster(mu).canonical_direction
    assert penalty_objective(hadamard, np.exp(1j * phi) * w) == pytest.approx(
        penalty_objective(hadamard, w), rel=1e-12)
