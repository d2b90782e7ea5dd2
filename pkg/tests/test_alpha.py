import math

import numpy as np
import pytest

from conftest import random_joint
from liftput.alpha import (
    EdgeScan,
    SweepConfig,
    build_eps_grid,
    candidate_pool,
    filter_band,
    run_algorithm1,
)
from liftput.errors import ValidationError
from liftput.exact import solve_maxlift_put
from liftput.lift import INF, eps_max, lift_table, posterior_alpha_lift, posterior_alpha_lifts
from liftput.polytope import VertexFamily, VertexSet, enumerate_vertices
from liftput.prob import conditional_s_given_x, entropy
from oracles import random_search_utility


class TestConfig:
    def test_valid(self):
        cfg = SweepConfig.uniform([INF, 10, 2], [0.1, 0.2])
        assert cfg.interp == (3, 3)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(alphas=(2, 10), epsilons=(0.1,), interp=(1,)),
            dict(alphas=(INF,), epsilons=(0.2, 0.1), interp=(1, 1)),
            dict(alphas=(INF,), epsilons=(0.1,), interp=(1, 1)),
            dict(alphas=(INF,), epsilons=(0.1,), interp=(0,)),
            dict(alphas=(1.0,), epsilons=(0.1,), interp=(1,)),
            dict(alphas=(INF,), epsilons=(0.1,), interp=(1,), delta=1.0),
            dict(alphas=(INF,), epsilons=(0.1,), interp=(1,), eps_tail=0.1),
            dict(alphas=(), epsilons=(0.1,), interp=(1,)),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValidationError):
            SweepConfig(**kw)


class TestEpsGrid:
    def test_example(self):
        cfg = SweepConfig((INF,), (0.1, 0.2), (2, 2), eps_tail=0.3)
        assert build_eps_grid(cfg) == [[0.1, 0.15], [0.2, 0.25]]

    def test_single(self):
        cfg = SweepConfig.uniform([INF], [0.1, 0.4], 1)
        assert build_eps_grid(cfg) == [[0.1], [0.4]]

    def test_full_grid_shape(self):
        eps = [round(0.005 * k, 3) for k in range(1, 191)]
        groups = build_eps_grid(SweepConfig.uniform([INF], eps, 3))
        assert all(len(g) == 3 for g in groups)
        assert groups[-1] == [0.95, 0.9666666666666667, 0.9833333333333333]


def test_candidate_pool_large_level(rng):
    j = random_joint(rng, 3, 4)
    pool = candidate_pool(j, [0.1, eps_max(j, INF) + 0.01])
    assert len(pool) == 2
    top = pool[max(pool)]
    np.testing.assert_allclose(top.vertices[np.lexsort(top.vertices.T[::-1])], np.eye(4)[::-1], atol=1e-12)


class TestFilterBand:
    def test_full_band_keeps_feasible(self, rng):
        j = random_joint(rng, 3, 5)
        ch = conditional_s_given_x(j)
        vs = enumerate_vertices(ch, j.p_s, 0.6)
        eps = 0.3
        out = filter_band(vs, ch, j.p_s, 2.0, eps, 1.0)
        vals = posterior_alpha_lifts(ch, j.p_s, vs.vertices, 2.0)
        assert len(out) == int(np.sum(vals <= math.exp(eps) * (1 + 1e-9)))

    def test_boundary_kept(self):
        ch = conditional_s_given_x(random_joint(np.random.default_rng(3), 2, 2))
        p_s = ch.matrix @ np.array([0.5, 0.5])
        v = np.array([[1.0, 0.0]])
        val = posterior_alpha_lift(ch, p_s, v[0], 3.0)
        out = filter_band(VertexSet(v, 0.0, "x"), ch, p_s, 3.0, math.log(val), 0.01)
        assert len(out) == 1
        out = filter_band(VertexSet(v, 0.0, "x"), ch, p_s, 3.0, math.log(val) - 1e-6, 0.01)
        assert len(out) == 0


def test_edge_scan_points_on_boundary(rng):
    j = random_joint(rng, 3, 5)
    ch = conditional_s_given_x(j)
    L = lift_table(ch, j.p_s).T
    eps = 0.5 * eps_max(j, 2.0)
    pts = EdgeScan(L, j.p_s, 2.0).crossings(eps)
    assert len(pts) > 0
    vals = posterior_alpha_lifts(ch, j.p_s, pts, 2.0)
    assert np.all(vals <= math.exp(eps) * (1 + 1e-12))
    np.testing.assert_allclose(vals, math.exp(eps), rtol=1e-12)
    assert np.all(np.count_nonzero(pts, axis=1) == 2)


def test_inf_row_equals_exact(rng):
    j = random_joint(rng, 4, 6)
    eps = [0.05, 0.1, 0.2, 0.4, 0.8]
    grid = run_algorithm1(j, SweepConfig.uniform([INF], eps, 3, eps_tail=1.0))
    fam = VertexFamily.from_joint(j)
    for e, sol in zip(eps, grid.results[0]):
        assert sol.utility == pytest.approx(solve_maxlift_put(j, e, fam).utility, abs=1e-9)


@pytest.mark.parametrize("literal", [False, True])
def test_grid_invariants(rng, literal):
    j = random_joint(rng, 4, 6)
    alphas = [INF, 20.0, 3.0, 1.5]
    eps = [0.05, 0.15, 0.3, 0.6, 0.9]
    kw = dict(include_feasible_basis=False, include_edge_points=False) if literal else {}
    cfg = SweepConfig.uniform(alphas, eps, 3, eps_tail=1.0, **kw)
    grid = run_algorithm1(j, cfg)
    U = grid.utility
    assert np.all(np.diff(U, axis=1) >= -1e-9)
    assert np.all(np.diff(U, axis=0) >= -1e-9)
    ch = conditional_s_given_x(j)
    for a, e, sol in grid.cells():
        vals = posterior_alpha_lifts(ch, j.p_s, sol.mechanism.columns, a)
        assert np.all(vals <= math.exp(e) * (1 + 1e-9))
        assert sol.alpha_leakage <= e + 1e-9
        sol.mechanism.check_consistent(j.p_x)
        if not literal and e >= eps_max(j, a):
            assert sol.utility == pytest.approx(entropy(j.p_x), abs=1e-9)
    assert grid.pool_sizes.shape == (4, 5)


def test_deterministic(rng):
    j = random_joint(rng, 3, 5)
    cfg = SweepConfig.uniform([INF, 4.0, 1.5], [0.1, 0.3], 3, eps_tail=0.5)
    a, b = run_algorithm1(j, cfg), run_algorithm1(j, cfg)
    np.testing.assert_array_equal(a.utility, b.utility)
    for ra, rb in zip(a.results, b.results):
        for x, y in zip(ra, rb):
            np.testing.assert_array_equal(x.mechanism.columns, y.mechanism.columns)


def test_micro_sweep_beats_random_search():
    rng = np.random.default_rng(7)
    for _ in range(2):
        j = random_joint(rng, 3, 4)
        grid = run_algorithm1(j, SweepConfig.uniform([INF, 2.0], [0.1, 0.3], 3, eps_tail=1.0))
        U = grid.utility
        assert np.all(U[1] >= U[0] - 1e-9)
        for k, e in enumerate((0.1, 0.3)):
            lb = random_search_utility(j.table, 2.0, e, 100_000, rng)
            assert U[1, k] >= lb - 1e-9
