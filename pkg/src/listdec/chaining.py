"""Computable pieces of the chaining argument behind RIP of DFT-type matrices.

The X' seminorm of a vector v with respect to a row-grouped matrix M is
(sum_t (sum_a |<M_{t,a}, v>|^2)^s)^(1/(2s)); the Maurey sampler approximates
a sparse unit vector by an average of m random signed basis vectors, and
covering_error_curve measures how fast that approximation improves in the
X' seminorm. The remaining operations check two scalar facts used along the
way: the Rademacher chaos moment bound and the delta-squared inequality.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._helpers import derive_seed
from .errors import BudgetError, InputError
from .simplex import ComplexMatrix

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-12
MAX_CHAOS_SIZE = 14
MAX_CHAOS_MOMENT = 4


@dataclass(frozen=True, eq=False)
class SparseUnitVector:
    """Real unit vector of length ``dimension`` with at most ``k`` nonzero positions."""

    dimension: int
    support: np.ndarray
    values: np.ndarray
    k: int = 0

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise InputError("sparse unit vectors must be real-valued")
        values = values.astype(np.float64)
        if support.shape != values.shape or support.ndim != 1:
            raise InputError("support and values must be equal-length sequences")
        if np.unique(support).size != support.size:
            raise InputError("support indices must be distinct")
        if support.size and (support.min() < 0 or support.max() >= self.dimension):
            raise InputError(f"support indices must lie in [0, {self.dimension})")
        k = self.k or support.size
        if support.size > k:
            raise InputError(f"support of size {support.size} exceeds sparsity {k}")
        if abs(float(np.linalg.norm(values)) - 1.0) > UNIT_TOLERANCE:
            raise InputError("vector does not have unit l2 norm")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_dense(cls, x, k: int = 0) -> SparseUnitVector:
        x = np.asarray(x)
        support = np.flatnonzero(x)
        return cls(x.size, support, x[support], k)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        dense[self.support] = self.values
        return dense


@dataclass(frozen=True)
class CoveringPoint:
    """Mean X' error of the Maurey approximation at one m, with its fitted envelope."""

    m: int
    mean_error: float
    std_error: float
    envelope: float


def random_sparse_unit(dimension: int, k: int, seed: int) -> SparseUnitVector:
    """Gaussian values on a uniformly random k-subset, normalized."""
    if not 1 <= k <= dimension:
        raise InputError(f"sparsity must lie in [1, {dimension}], got {k}")
    rng = np.random.default_rng(seed & (2**64 - 1))
    support = np.sort(rng.choice(dimension, size=k, replace=False))
    values = rng.standard_normal(k)
    return SparseUnitVector(dimension, support, values / np.linalg.norm(values), k)


def xprime_norm(M: ComplexMatrix, s: int, v) -> float:
    """(sum over row groups t of (sum_a |(Mv)_{t,a}|^2)^s)^(1/(2s)).

    The row action M @ v is used for the inner products, so s = 1 gives the
    Euclidean norm of Mv.
    """
    if M.groups is None:
        raise InputError("X' seminorm needs a row-grouped matrix")
    if s < 1:
        raise InputError(f"exponent s must be >= 1, got {s}")
    if isinstance(v, SparseUnitVector):
        v = v.to_dense()
    v = np.asarray(v)
    if v.shape != (M.cols,):
        raise InputError(f"vector length {v.shape} does not match {M.cols} columns")
    projections = np.abs(M.entries @ v) ** 2
    _, group_index = np.unique(M.groups, return_inverse=True)
    per_group = np.bincount(group_index, weights=projections)
    return float((per_group**s).sum() ** (1.0 / (2 * s)))


def maurey_sample(x: SparseUnitVector, m: int, seed: int) -> np.ndarray:
    """Z = (sqrt(k)/m) * sum of m independent draws Z_i with E[Z_i] = x/sqrt(k).

    Each Z_i is zero with probability 1 - ||x'||_1 (x' = x/sqrt(k)) and is
    otherwise sgn(x'_j) e_j with probability |x'_j|.
    """
    if not isinstance(x, SparseUnitVector):
        x = SparseUnitVector.from_dense(x)
    if m < 1:
        raise InputError(f"sample count must be >= 1, got {m}")
    rng = np.random.default_rng(seed & (2**64 - 1))
    scaled = x.values / math.sqrt(x.k)
    cumulative = np.cumsum(np.abs(scaled))
    picks = np.searchsorted(cumulative, rng.random(m), side="right")
    counts = np.bincount(picks, minlength=x.support.size + 1)[: x.support.size]
    Z = np.zeros(x.dimension)
    Z[x.support] = np.sign(scaled) * math.sqrt(x.k) * counts / m
    return Z


def covering_error_curve(
    x: SparseUnitVector,
    M: ComplexMatrix,
    s: int,
    m_values: Sequence[int],
    trials: int,
    seed: int,
) -> list[CoveringPoint]:
    """Mean ||Z - x||_{X'} per m, with envelope c * |T|^(1/2s) * sqrt(4qks/m).

    The envelope constant c is fitted at the largest m. Trial t of the i-th
    m uses seed derive_seed(seed, i * trials + t).
    """
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    if not m_values:
        raise InputError("at least one sample count m is required")
    group_count = M.group_count
    if group_count == 0:
        raise InputError("X' seminorm needs a row-grouped matrix")
    q = M.rows // group_count + 1
    dense = x.to_dense()

    means, stds = [], []
    for i, m in enumerate(m_values):
        errors = np.array(
            [
                xprime_norm(M, s, maurey_sample(x, m, derive_seed(seed, i * trials + t)) - dense)
                for t in range(trials)
            ]
        )
        means.append(float(errors.mean()))
        stds.append(float(errors.std()))

    def shape(m: int) -> float:
        return group_count ** (1 / (2 * s)) * math.sqrt(4 * q * x.k * s / m)

    largest = int(np.argmax(m_values))
    c = means[largest] / shape(m_values[largest])
    logger.debug("covering curve envelope constant %.6g", c)
    return [
        CoveringPoint(int(m), mean, std, c * shape(m))
        for m, mean, std in zip(m_values, means, stds)
    ]


def loglog_slope(curve: Sequence[CoveringPoint]) -> float:
    """Least-squares slope of log(mean error) against log(m)."""
    points = [(p.m, p.mean_error) for p in curve if p.mean_error > 0]
    if len(points) < 2:
        raise InputError("slope needs at least two points with positive error")
    ms, errs = zip(*points)
    return float(np.polyfit(np.log(ms), np.log(errs), 1)[0])


def chaos_moment_exact(a, s: int) -> Fraction:
    """E[(sum_ij a_ij e_i e_j)^s] over independent uniform signs e, exactly.

    Coefficients are converted to exact rationals (floats are dyadic), scaled
    to integers by their common denominator, and all 2^m sign patterns are
    enumerated.

    Raises:
        BudgetError: m > 14 or s > 4
    """
    rows = [[Fraction(v) for v in row] for row in a]
    m = len(rows)
    if m < 1 or any(len(row) != m for row in rows):
        raise InputError("coefficients must form a non-empty square grid")
    if s < 1:
        raise InputError(f"moment order must be >= 1, got {s}")
    if m > MAX_CHAOS_SIZE or s > MAX_CHAOS_MOMENT:
        raise BudgetError(
            f"chaos enumeration limited to m <= {MAX_CHAOS_SIZE}, s <= {MAX_CHAOS_MOMENT}"
        )

    denominator = math.lcm(*(f.denominator for row in rows for f in row))
    scaled = [[int(f * denominator) for f in row] for row in rows]
    signs = 1 - 2 * ((np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1)

    largest = max(abs(v) for row in scaled for v in row)
    if largest * m * m < 2**62:
        A = np.array(scaled, dtype=np.int64)
        forms = [int(v) for v in np.einsum("pi,ij,pj->p", signs, A, signs)]
    else:
        forms = [
            sum(scaled[i][j] * int(e[i]) * int(e[j]) for i in range(m) for j in range(m))
            for e in signs
        ]
    total = sum(v**s for v in forms)
    return Fraction(total, 2**m * denominator**s)


def chaos_moment_bound(K, m: int, s: int) -> Fraction:
    """(4Kms)^s, exact for rational K."""
    return (4 * Fraction(K) * m * s) ** s


def delta_sqr_check(a: float, mu: float, delta: float) -> bool:
    """Whether a * (a/(1+a))^(1/(1+mu)) <= delta^((2+mu)/(1+mu)) / 4."""
    if a <= 0:
        raise InputError(f"a must be positive, got {a}")
    if not 0 <= mu <= 1:
        raise InputError(f"mu must lie in [0, 1], got {mu}")
    if not 0 < delta <= 1:
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    lhs = a * (a / (1 + a)) ** (1 / (1 + mu))
    rhs = delta ** ((2 + mu) / (1 + mu)) / 4
    return lhs <= rhs
