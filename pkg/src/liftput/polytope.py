"""Vertex enumeration for the max-lift feasibility polytope.

For a budget ``eps`` the polytope is

    {V on the probability simplex over X : P_{S|X} V <= e^eps P_S}

A vertex is the unique solution of the normalisation row plus |X|-1
linearly independent active constraints, chosen among ``V_x = 0`` and the
tight lift rows ``(P_{S|X} V)_s = e^eps P_S(s)``.  Every active set is
enumerated.  The system matrix of an active set does not depend on
``eps`` and the right-hand side is affine in ``e^eps``, so each
nonsingular set is solved once as ``V(eps) = a + e^eps b`` and reused
across budgets (see :class:`VertexFamily`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, InfeasibleEps, ValidationError
from .prob import Channel, JointDistribution, conditional_s_given_x

TAU_FEAS = 1e-9
TAU_DEDUPE = 1e-8
DEFAULT_CAP = 10**7
# relative smallest singular value under which an active system is treated as singular
_RANK_TOL = 1e-12

EXACT_VERTEX = "exact-vertex"
ALGORITHM1_SEED = "algorithm1-seed"
PREVIOUS_SOLUTION = "previous-solution"


@dataclass(frozen=True)
class VertexSet:
    vertices: np.ndarray  # (k, |X|), one candidate column per row
    eps: float
    provenance: str = EXACT_VERTEX

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float, ndmin=2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]


def _dedupe_weights(d: int) -> np.ndarray:
    # fixed, irrational-ish direction so distinct vertices rarely share a projection
    return np.sqrt(np.arange(2, d + 2, dtype=float)) - 0.5


def dedupe_rows(points, tol: float = TAU_DEDUPE) -> np.ndarray:
    """Indices of rows kept by a first-seen greedy L-inf deduplication.

    Row ``i`` is dropped when some earlier *kept* row lies within ``tol``
    in L-inf distance.  Candidate pairs are found through a sorted 1-D
    projection, so the cost is close to linear for generic inputs.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n <= 1:
        return np.arange(n)
    w = _dedupe_weights(pts.shape[1])
    proj = pts @ w
    order = np.argsort(proj, kind="stable")
    sp = proj[order]
    hi = np.searchsorted(sp, sp + tol * np.abs(w).sum() * (1 + 1e-9) + 1e-15, side="right")
    counts = hi - np.arange(n) - 1
    if counts.sum() == 0:
        return np.arange(n)
    a_pos = np.repeat(np.arange(n), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    b_pos = a_pos + 1 + offsets
    a, b = order[a_pos], order[b_pos]
    close = np.max(np.abs(pts[a] - pts[b]), axis=1) <= tol
    a, b = a[close], b[close]
    if a.size == 0:
        return np.arange(n)
    lo, hi_ = np.minimum(a, b), np.maximum(a, b)
    earlier: dict[int, list[int]] = {}
    for i, j in zip(lo.tolist(), hi_.tolist()):
        earlier.setdefault(j, []).append(i)
    keep = np.ones(n, dtype=bool)
    for j in sorted(earlier):
        if any(keep[i] for i in earlier[j]):
            keep[j] = False
    return np.flatnonzero(keep)


def lexsort_rows(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return np.lexsort(pts.T[::-1])


def n_active_sets(x_card: int, s_card: int) -> int:
    return math.comb(x_card + s_card, x_card - 1)


class VertexFamily:
    """Parametric vertex candidates of the max-lift polytope for one prior.

    Parameters
    ----------
    channel_sx : Channel
        P_{S|X}, shape (|S|, |X|).
    p_s : array_like
        Strictly positive P_S.
    cap : int
        Maximum number of active sets to enumerate.
    """

    def __init__(self, channel_sx: Channel, p_s, cap: int = DEFAULT_CAP):
        self.channel_sx = channel_sx
        self.p_s = np.asarray(p_s, dtype=float)
        if np.any(self.p_s <= 0):
            raise ValidationError("P_S must be strictly positive")
        s_card, x_card = channel_sx.matrix.shape
        total = n_active_sets(x_card, s_card)
        if total > cap:
            raise CapExceeded(f"{total} active sets exceed the cap of {cap}")
        self.n_active_sets = total
        base, slope = [], []
        for t in range(0, min(s_card, x_card - 1) + 1):
            a, b = self._solve_block(t)
            base.append(a)
            slope.append(b)
        self.base = np.concatenate(base)
        self.slope = np.concatenate(slope)

    @classmethod
    def from_joint(cls, joint: JointDistribution, cap: int = DEFAULT_CAP) -> "VertexFamily":
        return cls(conditional_s_given_x(joint), joint.p_s, cap=cap)

    def _solve_block(self, t: int):
        """Solve all active sets with exactly ``t`` tight lift rows."""
        P = self.channel_sx.matrix
        s_card, x_card = P.shape
        combos = list(itertools.combinations(range(s_card), t))
        tight = np.array(combos, dtype=int).reshape(len(combos), t)
        free = np.array(list(itertools.combinations(range(x_card), t + 1)), dtype=int)
        ti = np.repeat(np.arange(len(tight)), len(free))
        fi = np.tile(np.arange(len(free)), len(tight))
        T, F = tight[ti], free[fi]
        k = len(ti)
        M = np.ones((k, t + 1, t + 1))
        if t:
            M[:, 1:, :] = P[T[:, :, None], F[:, None, :]]
        sv = np.linalg.svd(M, compute_uv=False)
        ok = sv[:, -1] > _RANK_TOL * sv[:, 0]
        M, T, F = M[ok], T[ok], F[ok]
        k = len(M)
        rhs = np.zeros((k, t + 1, 2))
        rhs[:, 0, 0] = 1.0
        if t:
            rhs[:, 1:, 1] = self.p_s[T]
        sol = np.linalg.solve(M, rhs)
        base = np.zeros((k, x_card))
        slope = np.zeros((k, x_card))
        rows = np.repeat(np.arange(k), t + 1)
        base[rows, F.ravel()] = sol[:, :, 0].ravel()
        slope[rows, F.ravel()] = sol[:, :, 1].ravel()
        return base, slope

    def vertices(self, eps: float, tol_feas: float = TAU_FEAS, tol_dedupe: float = TAU_DEDUPE) -> VertexSet:
        if not eps >= 0:
            raise InfeasibleEps(f"eps must be non-negative, got {eps!r}")
        scale = math.exp(eps)
        V = self.base + scale * self.slope
        bound = scale * self.p_s
        ok = np.all(V >= -tol_feas, axis=1)
        ok &= np.all(V @ self.channel_sx.matrix.T <= bound * (1 + tol_feas), axis=1)
        V = np.clip(V[ok], 0.0, None)
        V = V[lexsort_rows(V)]
        V = V[dedupe_rows(V, tol_dedupe)]
        return VertexSet(V, eps, EXACT_VERTEX)


def enumerate_vertices(channel_sx: Channel, p_s, eps: float, cap: int = DEFAULT_CAP) -> VertexSet:
    """Vertices of the max-lift polytope at budget ``eps`` (natural log)."""
    if not eps >= 0:
        raise InfeasibleEps(f"eps must be non-negative, got {eps!r}")
    return VertexFamily(channel_sx, p_s, cap=cap).vertices(eps)


def active_constraint_count(v, channel_sx: Channel, p_s, eps: float, tol: float = TAU_FEAS) -> int:
    """Number of nonnegativity and lift constraints tight at ``v``."""
    v = np.asarray(v, dtype=float)
    bound = math.exp(eps) * np.asarray(p_s, dtype=float)
    zeros = int(np.sum(np.abs(v) <= tol))
    tight = int(np.sum(np.abs(channel_sx.matrix @ v - bound) <= tol * bound))
    return zeros + tight


def write_vertex_csv(vs: VertexSet, path) -> None:
    """Debug dump: one vertex per row, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# eps={vs.eps!r} provenance={vs.provenance}\n")
        for row in vs.vertices:
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")
