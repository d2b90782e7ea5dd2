"""Finite-alphabet probability objects and information measures.

All entropies and mutual informations are reported in bits.  Vectors are
plain 1-D numpy arrays; channels are column-stochastic matrices where
column ``j`` is the distribution of the output given input ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentMechanism, NegativeEntry, SumNotOne, ValidationError, ZeroMarginal

TAU_SUM = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def check_prob_vector(p, tol: float = TAU_SUM) -> np.ndarray:
    """Return ``p`` as a float array after checking it lies on the simplex."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("probability vector must be 1-D and non-empty")
    if np.any(p < 0):
        raise NegativeEntry(f"negative probability {float(p.min())!r}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise SumNotOne(f"entries sum to {float(total)!r}")
    return p


@dataclass(frozen=True)
class JointDistribution:
    """Joint pmf P_SX with rows indexed by s and columns by x."""

    table: np.ndarray
    p_s: np.ndarray = field(init=False)
    p_x: np.ndarray = field(init=False)

    def __post_init__(self):
        t = _frozen(self.table)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "p_s", _frozen(t.sum(axis=1)))
        object.__setattr__(self, "p_x", _frozen(t.sum(axis=0)))

    @property
    def s_card(self) -> int:
        return self.table.shape[0]

    @property
    def x_card(self) -> int:
        return self.table.shape[1]

    def is_product(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.table, np.outer(self.p_s, self.p_x), rtol=0, atol=tol))


@dataclass(frozen=True)
class Channel:
    """Column-stochastic matrix; ``matrix[o, i]`` = P(out=o | in=i)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or 0 in m.shape:
            raise ValidationError("channel must be a non-empty 2-D table")
        if np.any(m < 0):
            raise NegativeEntry("channel has a negative entry")
        sums = m.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > TAU_SUM:
            raise SumNotOne(f"channel column sums deviate from 1 by {float(np.max(np.abs(sums - 1.0)))!r}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def n_out(self) -> int:
        return self.matrix.shape[0]

    def column(self, i: int) -> np.ndarray:
        return self.matrix[:, i]


@dataclass(frozen=True)
class Mechanism:
    """A privacy mechanism described through its backward channel.

    ``backward.matrix[:, y]`` is P_{X|Y=y} and ``p_y[y]`` is P_Y(y).
    Zero-mass outputs are not allowed; use :meth:`from_columns` to build
    one with pruning.
    """

    backward: Channel
    p_y: np.ndarray

    def __post_init__(self):
        p_y = check_prob_vector(self.p_y)
        if p_y.size != self.backward.n_in:
            raise ValidationError("P_Y length does not match the number of outputs")
        if np.any(p_y <= 0):
            raise ValidationError("every output must carry positive mass")
        object.__setattr__(self, "p_y", _frozen(p_y))

    @classmethod
    def from_columns(cls, columns, weights) -> "Mechanism":
        """Build from per-output posteriors (rows of ``columns``), dropping zero weights."""
        columns = np.atleast_2d(np.asarray(columns, dtype=float))
        weights = np.asarray(weights, dtype=float)
        keep = weights > 0
        return cls(Channel(columns[keep].T), weights[keep])

    @classmethod
    def identity(cls, p_x) -> "Mechanism":
        p_x = check_prob_vector(p_x)
        return cls.from_columns(np.eye(p_x.size), p_x)

    @classmethod
    def single_output(cls, p_x) -> "Mechanism":
        p_x = check_prob_vector(p_x)
        return cls(Channel(p_x[:, None]), np.ones(1))

    @property
    def n_outputs(self) -> int:
        return self.p_y.size

    @property
    def columns(self) -> np.ndarray:
        """Posteriors P_{X|Y=y} stacked as rows, shape (|Y|, |X|)."""
        return self.backward.matrix.T

    def induced_marginal(self) -> np.ndarray:
        return self.backward.matrix @ self.p_y

    def check_consistent(self, p_x, tol: float = TAU_SUM) -> None:
        p_x = np.asarray(p_x, dtype=float)
        if p_x.shape != (self.backward.n_out,):
            raise InconsistentMechanism("mechanism input alphabet does not match P_X")
        err = np.max(np.abs(self.induced_marginal() - p_x))
        if err > tol:
            raise InconsistentMechanism(f"P_X|Y P_Y differs from P_X by {err:.3e}")


def validate_joint(table, tol: float = TAU_SUM, renormalize: bool = False) -> JointDistribution:
    """Check a joint table and wrap it as a :class:`JointDistribution`.

    Raises
    ------
    NegativeEntry, SumNotOne, ZeroMarginal
    """
    t = np.array(table, dtype=float)
    if t.ndim != 2 or 0 in t.shape:
        raise ValidationError("joint table must be a rectangular non-empty 2-D array")
    if not np.all(np.isfinite(t)):
        raise ValidationError("joint table has non-finite entries")
    if np.any(t < 0):
        raise NegativeEntry(f"negative entry {float(t.min())!r}")
    total = t.sum()
    if renormalize:
        t = t / total
    elif abs(total - 1.0) > tol:
        raise SumNotOne(f"table sums to {float(total)!r}")
    if np.any(t.sum(axis=1) <= 0) or np.any(t.sum(axis=0) <= 0):
        raise ZeroMarginal("a marginal probability is zero; lift is undefined")
    return JointDistribution(t)


def conditional_s_given_x(joint: JointDistribution) -> Channel:
    return Channel(joint.table / joint.p_x[None, :])


def entropy(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    return float(entropies(np.asarray(p, dtype=float)[None, :])[0])


def entropies(rows: np.ndarray) -> np.ndarray:
    """Row-wise entropy in bits of a stack of distributions."""
    rows = np.asarray(rows, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log2(np.where(rows > 0, rows, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=-1), 0.0)


def conditional_entropy(m: Mechanism) -> float:
    """H(X|Y) = sum_y P_Y(y) h(P_{X|Y=y}) in bits."""
    return float(m.p_y @ entropies(m.columns))


def mutual_information(m: Mechanism, p_x) -> float:
    m.check_consistent(p_x)
    mi = entropy(p_x) - conditional_entropy(m)
    # rounding can push a zero-information mechanism a hair below 0
    return max(mi, 0.0)


def forward_channel(m: Mechanism, p_x) -> Channel:
    """Bayes-invert the backward channel into P_{Y|X} (shape |Y| x |X|)."""
    m.check_consistent(p_x)
    p_x = np.asarray(p_x, dtype=float)
    fwd = m.backward.matrix.T * m.p_y[:, None] / p_x[None, :]
    # absorb the O(tau) consistency slack so columns are exactly stochastic
    return Channel(fwd / fwd.sum(axis=0, keepdims=True))
