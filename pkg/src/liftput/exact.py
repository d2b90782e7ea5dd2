"""Exact privacy-utility optimum under a max-lift budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleEps
from .lift import INF, format_alpha, mechanism_leakage
from .linprog import MixtureSolution, solve_min_cost_mixture
from .polytope import VertexFamily, VertexSet
from .prob import JointDistribution, Mechanism, conditional_s_given_x, entropies, entropy, mutual_information


@dataclass(frozen=True)
class PutSolution:
    mechanism: Mechanism
    utility: float  # bits
    normalized_utility: float
    alpha_leakage: float  # nats
    maxlift_leakage: float  # nats
    eps: float
    alpha: float

    @property
    def support_size(self) -> int:
        return self.mechanism.n_outputs

    def to_dict(self) -> dict:
        return {
            "alpha": format_alpha(self.alpha),
            "eps": self.eps,
            "utility": self.utility,
            "normalized_utility": self.normalized_utility,
            "alpha_leakage": self.alpha_leakage,
            "maxlift_leakage": self.maxlift_leakage,
            "p_y": self.mechanism.p_y.tolist(),
            "p_x_given_y": self.mechanism.columns.tolist(),
        }


def evaluate(joint: JointDistribution, m: Mechanism, eps: float, alpha: float) -> PutSolution:
    """Score a mechanism: utility, normalised utility and both leakages."""
    ch = conditional_s_given_x(joint)
    util = mutual_information(m, joint.p_x)
    hx = entropy(joint.p_x)
    norm = util / hx if hx > 0 else 1.0
    return PutSolution(
        mechanism=m,
        utility=util,
        normalized_utility=min(max(norm, 0.0), 1.0),
        alpha_leakage=mechanism_leakage(m, ch, joint.p_s, alpha),
        maxlift_leakage=mechanism_leakage(m, ch, joint.p_s, INF),
        eps=eps,
        alpha=alpha,
    )


def extract_mechanism(q: MixtureSolution, candidates) -> Mechanism:
    """Keep the candidates with positive weight as the output alphabet."""
    V = candidates.vertices if isinstance(candidates, VertexSet) else np.atleast_2d(candidates)
    return Mechanism.from_columns(V[q.support], q.weights[q.support])


def solve_vertex_mixture(joint: JointDistribution, vertices) -> tuple[MixtureSolution, Mechanism]:
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    q = solve_min_cost_mixture(V, entropies(V), joint.p_x)
    return q, extract_mechanism(q, V)


def solve_maxlift_put(joint: JointDistribution, eps: float, family: VertexFamily | None = None) -> PutSolution:
    """Maximise I(X;Y) subject to max-lift leakage at most ``eps``.

    Parameters
    ----------
    joint : JointDistribution
    eps : float
        Budget in nats, ``eps >= 0``.
    family : VertexFamily, optional
        Pre-factored active sets for ``joint``; pass one when solving many
        budgets on the same prior.
    """
    if not eps >= 0 or math.isnan(eps):
        raise InfeasibleEps(f"eps must be non-negative, got {eps!r}")
    if family is None:
        family = VertexFamily.from_joint(joint)
    vs = family.vertices(eps)
    _, mech = solve_vertex_mixture(joint, vs.vertices)
    return evaluate(joint, mech, eps, INF)
