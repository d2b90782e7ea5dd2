"""Minimum-cost mixture LP.

Finds weights ``Q >= 0`` over candidate columns ``V^i`` with
``sum_i Q_i V^i = P_X`` and ``sum_i Q_i = 1`` minimising ``sum_i Q_i c_i``.
The program is tiny and dense (|X| + 1 rows), so it is solved with a
two-phase tableau simplex under Bland's rule: lowest-index entering
column, lowest-index leaving basic variable among ratio ties.  That makes
the returned basis deterministic for a fixed candidate order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPInfeasible, NumericalFailure, ValidationError

PIVOT_TOL = 1e-11
INFEASIBLE_TOL = 1e-8
SUPPORT_TOL = 1e-12
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class MixtureSolution:
    weights: np.ndarray
    objective: float
    support: np.ndarray
    n_pivots: int = 0

    @property
    def support_weights(self) -> np.ndarray:
        return self.weights[self.support]


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    f = T[:, col].copy()
    f[row] = 0.0
    T -= np.outer(f, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _bland(T: np.ndarray, basis: np.ndarray, n_cols: int, max_iter: int) -> int:
    """Run simplex iterations on tableau ``T`` whose last row holds reduced costs.

    Only the first ``n_cols`` columns may enter.  Returns the pivot count.
    """
    m = T.shape[0] - 1
    for it in range(max_iter):
        red = T[m, :n_cols]
        neg = np.flatnonzero(red < -PIVOT_TOL)
        if neg.size == 0:
            return it
        col = int(neg[0])
        colv = T[:m, col]
        pos = np.flatnonzero(colv > PIVOT_TOL)
        if pos.size == 0:
            raise NumericalFailure("unbounded direction in a bounded mixture LP")
        ratios = T[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, col)
    raise NumericalFailure(f"simplex did not terminate within {max_iter} pivots")


def solve_min_cost_mixture(candidates, costs, p_x, max_iter: int | None = None) -> MixtureSolution:
    """Optimal basic mixture of ``candidates`` (rows) reproducing ``p_x``.

    Raises
    ------
    LPInfeasible
        If ``p_x`` is not in the convex hull of the candidates.
    """
    V = np.atleast_2d(np.asarray(candidates, dtype=float))
    c = np.asarray(costs, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    n_cand, d = V.shape
    if c.shape != (n_cand,) or p_x.shape != (d,):
        raise ValidationError("candidate, cost and P_X dimensions disagree")
    A = np.vstack([V.T, np.ones((1, n_cand))])
    b = np.concatenate([p_x, [1.0]])
    m = A.shape[0]
    if max_iter is None:
        max_iter = 50 * (n_cand + m) + 1000

    # phase 1: artificial basis, minimise the sum of artificials
    T = np.zeros((m + 1, n_cand + m + 1))
    T[:m, :n_cand] = A
    T[:m, n_cand : n_cand + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n_cand] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n_cand, n_cand + m)
    pivots = _bland(T, basis, n_cand, max_iter)
    if -T[m, -1] > INFEASIBLE_TOL:
        raise LPInfeasible(f"P_X lies outside the candidate hull (phase-1 residual {-T[m, -1]:.3e})")

    # drive remaining artificials out; rows that cannot be cleared are redundant
    keep_rows = []
    for r in range(m):
        if basis[r] >= n_cand:
            nz = np.flatnonzero(np.abs(T[r, :n_cand]) > 1e-9)
            if nz.size == 0:
                continue
            _pivot(T, basis, r, int(nz[0]))
            pivots += 1
        keep_rows.append(r)
    rows = np.array(keep_rows)
    T2 = np.zeros((len(rows) + 1, n_cand + 1))
    T2[:-1, :n_cand] = T[rows, :n_cand]
    T2[:-1, -1] = T[rows, -1]
    basis = basis[rows].copy()
    # phase 2 reduced costs
    T2[-1, :n_cand] = c - c[basis] @ T2[:-1, :n_cand]
    T2[-1, -1] = -c[basis] @ T2[:-1, -1]
    pivots += _bland(T2, basis, n_cand, max_iter)

    # recompute basic weights from the original data to shed tableau drift
    q_b, *_ = np.linalg.lstsq(A[:, basis], b, rcond=None)
    q_b = np.where(q_b < SUPPORT_TOL, 0.0, q_b)
    weights = np.zeros(n_cand)
    weights[basis] = q_b
    resid = np.max(np.abs(A @ weights - b))
    if resid > RESIDUAL_TOL:
        raise NumericalFailure(f"mixture residual {resid:.3e} exceeds {RESIDUAL_TOL}")
    support = np.sort(np.flatnonzero(weights > 0))
    return MixtureSolution(weights, float(weights @ c), support, pivots)
