"""Lift, alpha-lift and the leakage of mechanisms.

``alpha`` is a float in (1, inf]; ``math.inf`` selects the max-lift branch
and is never emulated by a large finite order.  Leakages are natural logs.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .prob import Channel, JointDistribution, Mechanism, conditional_s_given_x

INF = math.inf


def check_alpha(alpha) -> float:
    a = float(alpha)
    if math.isnan(a) or not a > 1.0:
        raise ValidationError(f"alpha must lie in (1, inf], got {alpha!r}")
    return a


def parse_alpha(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    return check_alpha(text)


def format_alpha(alpha: float) -> str:
    return "inf" if math.isinf(alpha) else repr(float(alpha))


def lift_table(channel_sx: Channel, p_s) -> np.ndarray:
    """l(s, x) = P(s|x) / P(s), shape (|S|, |X|)."""
    p_s = np.asarray(p_s, dtype=float)
    if np.any(p_s <= 0):
        raise ValidationError("P_S must be strictly positive")
    return channel_sx.matrix / p_s[:, None]


def alpha_lifts(lifts, p_s, alpha: float) -> np.ndarray:
    """Alpha-lift of every lift column along the last axis.

    ``lifts`` has shape (..., |S|).  The finite branch is evaluated in the
    log domain so large orders (alpha = 100) do not overflow; zero lifts
    contribute nothing.
    """
    alpha = check_alpha(alpha)
    lifts = np.asarray(lifts, dtype=float)
    if math.isinf(alpha):
        return lifts.max(axis=-1)
    log_ps = np.log(np.asarray(p_s, dtype=float))
    pos = lifts > 0
    with np.errstate(divide="ignore"):
        terms = np.where(pos, log_ps + alpha * np.log(np.where(pos, lifts, 1.0)), -np.inf)
    peak = terms.max(axis=-1, keepdims=True)
    lse = peak[..., 0] + np.log(np.exp(terms - peak).sum(axis=-1))
    return np.exp(lse / alpha)


def alpha_lift(lift_column, p_s, alpha: float) -> float:
    return float(alpha_lifts(np.asarray(lift_column, dtype=float), p_s, alpha))


def posterior_lifts(channel_sx: Channel, p_s, columns) -> np.ndarray:
    """Lift columns of P_{S|Y=y} = P_{S|X} v for each row v of ``columns``."""
    columns = np.asarray(columns, dtype=float)
    return (columns @ channel_sx.matrix.T) / np.asarray(p_s, dtype=float)


def posterior_alpha_lifts(channel_sx: Channel, p_s, columns, alpha: float) -> np.ndarray:
    return alpha_lifts(posterior_lifts(channel_sx, p_s, columns), p_s, alpha)


def posterior_alpha_lift(channel_sx: Channel, p_s, v, alpha: float) -> float:
    """Alpha-lift of the posterior induced by a single backward column ``v``."""
    return float(posterior_alpha_lifts(channel_sx, p_s, np.asarray(v, dtype=float)[None, :], alpha)[0])


def column_alpha_lifts(joint: JointDistribution, alpha: float) -> np.ndarray:
    """Alpha-lift of P_{S|X=x} for every x."""
    lifts = lift_table(conditional_s_given_x(joint), joint.p_s)
    return alpha_lifts(lifts.T, joint.p_s, alpha)


def eps_max(joint: JointDistribution, alpha: float) -> float:
    """Budget above which every mechanism is private: log max_x alpha-lift of column x."""
    return float(np.log(column_alpha_lifts(joint, alpha).max()))


def mechanism_leakage(m: Mechanism, channel_sx: Channel, p_s, alpha: float, p_x=None) -> float:
    """max_y log alpha-lift(P_{S|Y=y} || P_S).

    When ``p_x`` is omitted it is recovered as P_{S|X}-compatible input
    marginal from the mechanism itself; pass it to enforce consistency.
    """
    if p_x is not None:
        m.check_consistent(p_x)
    vals = posterior_alpha_lifts(channel_sx, p_s, m.columns, alpha)
    return float(np.log(vals.max()))


def max_lift_leakage(m: Mechanism, channel_sx: Channel, p_s, p_x=None) -> float:
    return mechanism_leakage(m, channel_sx, p_s, INF, p_x=p_x)
