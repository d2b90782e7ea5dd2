"""Independent reference computations used by the test suite.

Nothing here imports the solver paths under test: vertices are found with
exact rational Gaussian elimination, mixtures by exhaustive support
search, divergences straight from their textbook formulas.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def _rational_solve(rows, rhs):
    """Solve a square system over Fractions; None if singular."""
    n = len(rows)
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def rational_vertices(table, eps: float) -> np.ndarray:
    """Vertices of {V in simplex : P_{S|X} V <= e^eps P_S} by exhaustive active sets.

    The float table and float ``e^eps`` are converted exactly to
    Fractions, so feasibility and dedupe are decided without rounding.
    Degenerate vertices reached through several active sets solve to the
    same rational point and collapse in the set.
    """
    T = [[Fraction(float(v)) for v in row] for row in np.asarray(table)]
    # float tables rarely sum to exactly 1; normalise so eps = 0 stays consistent
    total = sum(sum(row) for row in T)
    T = [[v / total for v in row] for row in T]
    s_card, x_card = len(T), len(T[0])
    p_s = [sum(row) for row in T]
    p_x = [sum(T[s][x] for s in range(s_card)) for x in range(x_card)]
    P = [[T[s][x] / p_x[x] for x in range(x_card)] for s in range(s_card)]
    cap = Fraction(math.exp(eps))
    cons = []
    for x in range(x_card):
        cons.append(([Fraction(int(i == x)) for i in range(x_card)], Fraction(0)))
    for s in range(s_card):
        cons.append((P[s], cap * p_s[s]))
    ones = [Fraction(1)] * x_card
    found = set()
    for combo in itertools.combinations(range(len(cons)), x_card - 1):
        rows = [ones] + [cons[k][0] for k in combo]
        rhs = [Fraction(1)] + [cons[k][1] for k in combo]
        v = _rational_solve(rows, rhs)
        if v is None or any(c < 0 for c in v):
            continue
        if all(sum(P[s][x] * v[x] for x in range(x_card)) <= cap * p_s[s] for s in range(s_card)):
            found.add(tuple(v))
    out = np.array([[float(c) for c in v] for v in sorted(found)], dtype=float)
    return out.reshape(-1, x_card)


def entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def brute_force_mixture(V, costs, p_x, tol: float = 1e-10):
    """Minimum of sum q_i c_i over every linearly independent support.

    Returns ``(objective, support, weights)``.  Each support of size up to
    |X| is solved through batched normal equations; supports whose
    solution is negative or does not reproduce ``p_x`` are discarded.
    """
    V = np.asarray(V, dtype=float)
    costs = np.asarray(costs, dtype=float)
    p_x = np.asarray(p_x, dtype=float)
    m, d = V.shape
    best = (math.inf, None, None)
    for k in range(1, min(m, d) + 1):
        subsets = np.array(list(itertools.combinations(range(m), k)), dtype=int)
        A = V[subsets].transpose(0, 2, 1)  # (count, d, k)
        G = A.transpose(0, 2, 1) @ A
        sv = np.linalg.svd(G, compute_uv=False)
        ok = sv[:, -1] > 1e-12 * sv[:, 0]
        if not ok.any():
            continue
        A, G, subsets = A[ok], G[ok], subsets[ok]
        rhs = A.transpose(0, 2, 1) @ p_x
        q = np.linalg.solve(G, rhs[..., None])[..., 0]
        resid = np.abs(np.einsum("cdk,ck->cd", A, q) - p_x).max(axis=1)
        good = (resid <= 1e-9) & (q.min(axis=1) >= -tol)
        if not good.any():
            continue
        obj = (q[good] * costs[subsets[good]]).sum(axis=1)
        i = int(np.argmin(obj))
        if obj[i] < best[0]:
            best = (float(obj[i]), subsets[good][i], q[good][i])
    return best


def brute_force_put(table, eps: float) -> float:
    """Max-lift utility in bits from rational vertices and exhaustive mixtures."""
    table = np.asarray(table, dtype=float)
    p_x = table.sum(axis=0)
    V = rational_vertices(table, eps)
    costs = np.array([entropy_bits(v) for v in V])
    obj, _, _ = brute_force_mixture(V, costs, p_x)
    return entropy_bits(p_x) - obj


def renyi_divergence(p, q, alpha: float) -> float:
    """D_alpha(P||Q) in nats; the alpha = inf case is log max p/q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if math.isinf(alpha):
        return float(np.log(np.max(p / q)))
    m = p > 0
    # log-sum-exp keeps large orders finite
    t = alpha * np.log(p[m]) + (1 - alpha) * np.log(q[m])
    top = t.max()
    return float((top + np.log(np.sum(np.exp(t - top)))) / (alpha - 1))


def random_search_utility(table, alpha: float, eps: float, n: int, rng, max_outputs: int = 6) -> float:
    """Best utility (bits) over ``n`` random forward channels meeting the budget.

    Channels are random Dirichlet rows pulled towards a random constant
    channel by a random amount, so both informative and nearly
    uninformative mechanisms are explored.  Posteriors are formed by Bayes
    rule directly from the joint.
    """
    table = np.asarray(table, dtype=float)
    p_s, p_x = table.sum(axis=1), table.sum(axis=0)
    d = p_x.size
    hx = entropy_bits(p_x)
    cap = math.exp(eps)
    best = 0.0
    batch = 5000
    for start in range(0, n, batch):
        b = min(batch, n - start)
        k = int(rng.integers(2, max_outputs + 1))
        W = rng.dirichlet(np.full(k, 0.3), size=(b, d))  # (b, x, y)
        r = rng.dirichlet(np.ones(k), size=b)[:, None, :]
        t = rng.uniform(0, 1, size=(b, 1, 1)) ** 2
        fwd = t * W + (1 - t) * r
        p_xy = p_x[None, :, None] * fwd
        p_y = p_xy.sum(axis=1)
        p_sy = np.einsum("sx,bxy->bsy", table / p_x, p_xy)
        post_s = p_sy / p_y[:, None, :]
        lifts = post_s / p_s[None, :, None]
        if math.isinf(alpha):
            al = lifts.max(axis=1)
        else:
            al = np.sum(p_s[None, :, None] * lifts**alpha, axis=1) ** (1 / alpha)
        feasible = np.all(al <= cap, axis=1)
        if not feasible.any():
            continue
        post_x = p_xy / p_y[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            hcond = -np.nansum(np.where(post_x > 0, post_x * np.log2(post_x), 0.0), axis=1)
        util = hx - np.sum(p_y * hcond, axis=1)
        best = max(best, float(util[feasible].max()))
    return best
