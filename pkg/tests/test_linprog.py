import numpy as np
import pytest

from liftput.errors import LPInfeasible
from liftput.linprog import solve_min_cost_mixture
from liftput.prob import entropies
from oracles import brute_force_mixture


def test_basis_vectors():
    p = np.array([0.2, 0.3, 0.5])
    sol = solve_min_cost_mixture(np.eye(3), np.zeros(3), p)
    np.testing.assert_allclose(sol.weights, p, atol=1e-12)
    assert sol.objective == pytest.approx(0.0, abs=1e-12)


def test_singleton():
    p = np.array([0.25, 0.75])
    sol = solve_min_cost_mixture(p[None, :], np.array([0.8]), p)
    np.testing.assert_allclose(sol.weights, [1.0])
    assert list(sol.support) == [0]


def test_prefers_cheaper():
    # prior reachable either as itself (cost 1) or from the basis (cost 0)
    p = np.array([0.5, 0.5])
    V = np.array([[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]])
    sol = solve_min_cost_mixture(V, np.array([1.0, 0.0, 0.0]), p)
    np.testing.assert_allclose(sol.weights, [0, 0.5, 0.5], atol=1e-12)


def test_infeasible():
    V = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(LPInfeasible):
        solve_min_cost_mixture(V, np.zeros(2), np.array([0.3, 0.3, 0.4]))


def _random_case(rng, d, m):
    V = rng.dirichlet(np.full(d, 0.5), size=m)
    q = rng.dirichlet(np.ones(m))
    return V, V.T @ q


def test_matches_brute_force(rng):
    for _ in range(40):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(d, 13))
        V, p = _random_case(rng, d, m)
        costs = entropies(V)
        sol = solve_min_cost_mixture(V, costs, p)
        want, _, _ = brute_force_mixture(V, costs, p)
        assert sol.objective == pytest.approx(want, abs=1e-9)
        np.testing.assert_allclose(sol.weights @ V, p, atol=1e-9)
        assert np.all(sol.weights >= 0)
        assert sol.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert len(sol.support) <= d


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_cost_scaling(rng, c):
    V, p = _random_case(rng, 3, 9)
    costs = entropies(V)
    a = solve_min_cost_mixture(V, costs, p)
    b = solve_min_cost_mixture(V, c * costs, p)
    assert b.objective == pytest.approx(c * a.objective, rel=1e-9, abs=1e-12)


def test_deterministic(rng):
    V, p = _random_case(rng, 4, 12)
    costs = entropies(V)
    a = solve_min_cost_mixture(V, costs, p)
    b = solve_min_cost_mixture(V.copy(), costs.copy(), p.copy())
    np.testing.assert_array_equal(a.weights, b.weights)


def test_duplicate_rows_redundant():
    # a repeated constraint row must not break phase 1
    V = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
    p = np.array([0.25, 0.25, 0.5])
    sol = solve_min_cost_mixture(V, np.array([1.0, 0.5, 0.0]), p)
    assert sol.objective == pytest.approx(0.25)
