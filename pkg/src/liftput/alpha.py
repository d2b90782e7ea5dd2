"""Heuristic utility estimation under finite-order alpha-lift budgets.

The feasible set for a finite order has curved boundary, so its extreme
points cannot be listed directly.  Instead, vertices of max-lift
polytopes at slightly larger budgets ``eps'`` are screened: a vertex whose
alpha-lift falls in the band ``[(1 - delta) e^eps, e^eps]`` sits close to
the alpha boundary and is kept as a candidate.  Each (alpha_i, eps_j) cell
then solves the same min-entropy mixture LP as the max-lift case over

* the optimal max-lift support at eps_j (always feasible),
* the supports found for (alpha_{i-1}, eps_j) and (alpha_i, eps_{j-1}),
* band-screened vertices from every budget level eps' >= eps_j,
* basis vectors already within budget, and the points where each simplex
  edge crosses the alpha boundary (both switchable in ``SweepConfig``).

Without the last two sources small orders cannot reach full utility:
a basis vector enters the max-lift pool only once eps' passes its
max-lift, which may lie beyond ``eps_tail``.

Rows of the grid are processed with alpha decreasing, columns with eps
increasing, so every cell's pool contains feasible solutions of its
neighbours and the utility grid is monotone by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .errors import NumericalFailure, ValidationError
from .exact import PutSolution, evaluate, solve_maxlift_put, solve_vertex_mixture
from .lift import alpha_lifts, check_alpha, lift_table, posterior_alpha_lifts
from .polytope import TAU_DEDUPE, TAU_FEAS, VertexFamily, VertexSet, dedupe_rows
from .prob import JointDistribution, conditional_s_given_x


@dataclass(frozen=True)
class SweepConfig:
    """Grid and screening parameters.

    ``alphas`` must be strictly decreasing (``math.inf`` allowed first),
    ``epsilons`` strictly increasing, one interpolation count per budget,
    and ``eps_tail`` above the last budget.
    """

    alphas: tuple
    epsilons: tuple
    interp: tuple
    delta: float = 0.01
    eps_tail: float = 1.0
    include_feasible_basis: bool = True
    include_edge_points: bool = True

    def __post_init__(self):
        alphas = tuple(check_alpha(a) for a in self.alphas)
        eps = tuple(float(e) for e in self.epsilons)
        interp = tuple(int(n) for n in self.interp)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "interp", interp)
        if not alphas or not eps:
            raise ValidationError("alpha and eps grids must be non-empty")
        if any(a <= b for a, b in zip(alphas, alphas[1:])):
            raise ValidationError("alphas must be strictly decreasing")
        if eps[0] < 0 or any(a >= b for a, b in zip(eps, eps[1:])):
            raise ValidationError("epsilons must be non-negative and strictly increasing")
        if len(interp) != len(eps) or any(n < 1 for n in interp):
            raise ValidationError("need one positive interpolation count per eps")
        if not 0 < self.delta < 1:
            raise ValidationError("delta must lie in (0, 1)")
        if not self.eps_tail > eps[-1]:
            raise ValidationError("eps_tail must exceed the largest eps")

    @classmethod
    def uniform(cls, alphas, epsilons, n: int = 3, delta: float = 0.01, eps_tail: float = 1.0, **kw) -> "SweepConfig":
        return cls(tuple(alphas), tuple(epsilons), (n,) * len(epsilons), delta, eps_tail, **kw)


def _dec(x: float) -> Decimal:
    return Decimal(repr(float(x)))


def build_eps_grid(cfg: SweepConfig) -> list[list[float]]:
    """Interpolated budget levels for each eps_j, computed in decimal arithmetic."""
    edges = [_dec(e) for e in cfg.epsilons] + [_dec(cfg.eps_tail)]
    groups = []
    for j, n in enumerate(cfg.interp):
        lo, hi = edges[j], edges[j + 1]
        step = (hi - lo) / n
        groups.append(sorted({float(lo + k * step) for k in range(n)}))
    return groups


def candidate_pool(joint: JointDistribution, levels, family: VertexFamily | None = None) -> dict[float, VertexSet]:
    """Max-lift polytope vertices at each budget level."""
    if family is None:
        family = VertexFamily.from_joint(joint)
    return {float(e): family.vertices(float(e)) for e in sorted(set(levels))}


def filter_band(vs: VertexSet, channel_sx, p_s, alpha: float, eps_j: float, delta: float) -> VertexSet:
    """Keep vertices with alpha-lift in ``[(1 - delta) e^eps_j, e^eps_j]``.

    The upper end is closed up to the relative feasibility tolerance so
    vertices built to sit exactly on the boundary survive rounding.
    """
    if len(vs) == 0:
        return vs
    vals = posterior_alpha_lifts(channel_sx, p_s, vs.vertices, alpha)
    cap = math.exp(eps_j)
    keep = (vals >= (1 - delta) * cap) & (vals <= cap * (1 + TAU_FEAS))
    return VertexSet(vs.vertices[keep], vs.eps, vs.provenance)


class EdgeScan:
    """Alpha-lift along every edge of the simplex, for one order ``alpha``.

    Along the edge between basis vectors ``e_a`` and ``e_b`` the lift
    column is affine in the mixing weight, so the alpha-lift is convex and
    each sublevel set is an interval.  Interval endpoints interior to an
    edge are extreme points of the alpha-feasible set.  The minimiser of
    every edge is found once by ternary search; :meth:`crossings` then
    bisects towards both ends for a given budget.

    ``lift_rows`` holds the lift column of each input symbol as a row.
    """

    def __init__(self, lift_rows: np.ndarray, p_s, alpha: float, iters: int = 70):
        self.d = lift_rows.shape[0]
        self.p_s = p_s
        self.alpha = alpha
        self.iters = iters
        self.pairs = np.array(list(itertools.combinations(range(self.d), 2)), dtype=int).reshape(-1, 2)
        self._la = lift_rows[self.pairs[:, 0]]
        self._lb = lift_rows[self.pairs[:, 1]]
        lo, hi = np.zeros(len(self.pairs)), np.ones(len(self.pairs))
        for _ in range(iters):
            m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
            left = self._f(m1) < self._f(m2)
            hi, lo = np.where(left, m2, hi), np.where(left, lo, m1)
        self.t_min = (lo + hi) / 2
        self.f_min = self._f(self.t_min)
        self.f_ends = np.stack([self._f(np.zeros(len(self.pairs))), self._f(np.ones(len(self.pairs)))])

    def _f(self, t, idx=slice(None)):
        return alpha_lifts((1 - t)[:, None] * self._la[idx] + t[:, None] * self._lb[idx], self.p_s, self.alpha)

    def crossings(self, eps: float) -> np.ndarray:
        """Feasible-side points where the edge alpha-lift meets ``e^eps``."""
        cap = math.exp(eps)
        reach = self.f_min <= cap
        edge, side = [], []
        for end in (0, 1):
            idx = np.flatnonzero(reach & (self.f_ends[end] > cap))
            edge.append(idx)
            side.append(np.full(len(idx), float(end)))
        idx = np.concatenate(edge)
        if idx.size == 0:
            return np.zeros((0, self.d))
        a, b = self.t_min[idx], np.concatenate(side)
        for _ in range(self.iters):
            mid = (a + b) / 2
            ok = self._f(mid, idx) <= cap
            a, b = np.where(ok, mid, a), np.where(ok, b, mid)
        pr = self.pairs[idx]
        pts = np.zeros((len(idx), self.d))
        rows = np.arange(len(idx))
        pts[rows, pr[:, 0]] = 1 - a
        pts[rows, pr[:, 1]] = a
        return pts


def edge_boundary_points(lift_rows: np.ndarray, p_s, alpha: float, eps: float) -> np.ndarray:
    return EdgeScan(lift_rows, p_s, alpha).crossings(eps)


@dataclass
class SweepGrid:
    alphas: tuple
    epsilons: tuple
    results: list  # results[i][j] -> PutSolution
    pool_sizes: np.ndarray = field(default=None)

    def matrix(self, attr: str) -> np.ndarray:
        return np.array([[getattr(r, attr) for r in row] for row in self.results])

    @property
    def utility(self) -> np.ndarray:
        return self.matrix("utility")

    @property
    def normalized_utility(self) -> np.ndarray:
        return self.matrix("normalized_utility")

    def cells(self):
        for i, a in enumerate(self.alphas):
            for j, e in enumerate(self.epsilons):
                yield a, e, self.results[i][j]


def _union(parts) -> np.ndarray:
    stacked = np.vstack([p for p in parts if len(p)])
    return stacked[dedupe_rows(stacked, TAU_DEDUPE)]


def run_algorithm1(
    joint: JointDistribution,
    cfg: SweepConfig,
    family: VertexFamily | None = None,
    seeds: list[PutSolution] | None = None,
) -> SweepGrid:
    """Estimate the utility of every (alpha, eps) cell of ``cfg``.

    ``seeds`` may carry precomputed max-lift solutions, one per eps_j.
    """
    if family is None:
        family = VertexFamily.from_joint(joint)
    channel = conditional_s_given_x(joint)
    p_s = joint.p_s
    groups = build_eps_grid(cfg)
    pool = candidate_pool(joint, [e for g in groups for e in g], family)

    # every pooled vertex in ascending eps' order, tagged with the group it came from
    blocks, owner = [], []
    for k, g in enumerate(groups):
        for e in g:
            blocks.append(pool[e].vertices)
            owner.append(np.full(len(pool[e]), k))
    d = joint.x_card
    all_v = np.vstack(blocks) if blocks else np.zeros((0, d))
    all_owner = np.concatenate(owner) if owner else np.zeros(0, dtype=int)

    if seeds is None:
        seeds = [solve_maxlift_put(joint, e, family) for e in cfg.epsilons]
    seed_cols = [s.mechanism.columns for s in seeds]

    basis = np.eye(d)
    lift_rows = lift_table(channel, p_s).T
    n_a, n_b = len(cfg.alphas), len(cfg.epsilons)
    empty = np.zeros((0, d))
    prev_alpha = [empty] * n_b
    results = [[None] * n_b for _ in range(n_a)]
    sizes = np.zeros((n_a, n_b), dtype=int)
    for i, alpha in enumerate(cfg.alphas):
        lifts = posterior_alpha_lifts(channel, p_s, all_v, alpha)
        basis_lifts = posterior_alpha_lifts(channel, p_s, basis, alpha)
        edges = EdgeScan(lift_rows, p_s, alpha) if cfg.include_edge_points else None
        prev_eps = empty
        row = []
        for j, eps in enumerate(cfg.epsilons):
            cap = math.exp(eps)
            band = (all_owner >= j) & (lifts >= (1 - cfg.delta) * cap) & (lifts <= cap * (1 + TAU_FEAS))
            parts = [seed_cols[j], prev_alpha[j], prev_eps, all_v[band]]
            if cfg.include_feasible_basis:
                parts.append(basis[basis_lifts <= cap * (1 + TAU_FEAS)])
            if cfg.include_edge_points:
                parts.append(edges.crossings(eps))
            cand = _union(parts)
            vals = posterior_alpha_lifts(channel, p_s, cand, alpha)
            if np.any(vals > cap * (1 + TAU_FEAS)):
                raise NumericalFailure(f"infeasible candidate in cell alpha={alpha}, eps={eps}")
            _, mech = solve_vertex_mixture(joint, cand)
            sol = evaluate(joint, mech, eps, alpha)
            results[i][j] = sol
            sizes[i, j] = len(cand)
            prev_eps = mech.columns
            row.append(mech.columns)
        prev_alpha = row
    return SweepGrid(cfg.alphas, cfg.epsilons, results, sizes)
