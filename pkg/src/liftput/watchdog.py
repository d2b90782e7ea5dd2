"""Complete-merge watchdog baseline.

Symbols whose own posterior already meets the budget are released as-is;
the rest are merged into one output whose posterior is P_X restricted to
the merged set.  If the merged output still leaks too much, the kept
symbol with the largest alpha-lift joins the merge (lowest index on
ties) until the budget holds.  Merging everything gives the prior as
posterior, which is always private, so the loop terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleEps
from .exact import PutSolution, evaluate
from .lift import column_alpha_lifts, posterior_alpha_lift
from .polytope import TAU_FEAS
from .prob import JointDistribution, Mechanism, conditional_s_given_x


@dataclass(frozen=True)
class MergePartition:
    low_set: tuple
    merge_set: tuple


def merge_partition(joint: JointDistribution, eps: float, alpha: float) -> MergePartition:
    if not eps >= 0:
        raise InfeasibleEps(f"eps must be non-negative, got {eps!r}")
    channel = conditional_s_given_x(joint)
    cap = math.exp(eps)
    col = column_alpha_lifts(joint, alpha)
    merged = col > cap * (1 + TAU_FEAS)
    while merged.any() and not merged.all():
        v = np.where(merged, joint.p_x, 0.0)
        v /= v.sum()
        if posterior_alpha_lift(channel, joint.p_s, v, alpha) <= cap * (1 + TAU_FEAS):
            break
        # argmax returns the lowest index among ties
        victim = int(np.argmax(np.where(merged, -np.inf, col)))
        merged[victim] = True
    idx = np.arange(joint.x_card)
    return MergePartition(tuple(idx[~merged].tolist()), tuple(idx[merged].tolist()))


def watchdog_mechanism(joint: JointDistribution, part: MergePartition) -> Mechanism:
    d = joint.x_card
    cols, weights = [], []
    for x in part.low_set:
        e = np.zeros(d)
        e[x] = 1.0
        cols.append(e)
        weights.append(joint.p_x[x])
    if part.merge_set:
        ms = list(part.merge_set)
        v = np.zeros(d)
        v[ms] = joint.p_x[ms]
        mass = v.sum()
        cols.append(v / mass)
        weights.append(mass)
    return Mechanism.from_columns(np.array(cols), np.array(weights))


def watchdog_merge(joint: JointDistribution, eps: float, alpha: float) -> PutSolution:
    part = merge_partition(joint, eps, alpha)
    return evaluate(joint, watchdog_mechanism(joint, part), eps, alpha)
