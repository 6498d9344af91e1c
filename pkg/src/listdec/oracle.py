"""Brute-force list sizes: the count that list decodability bounds.

A center r sees codeword c when d(r, c) < rho*n, compared exactly as
d * rho.denominator < rho.numerator * n. Codewords are counted per message,
so repeated codewords count repeatedly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .codes import LinearCode
from .errors import BudgetError, InputError
from .gf import messages

logger = logging.getLogger(__name__)

MAX_CENTERS = 2**24
RADIUS_GRANULARITY = 10**9
_CELL_BUDGET = 1 << 22

OracleMode = Literal["exhaustive", "sampled"]


@dataclass(frozen=True)
class ListOracleResult:
    """Largest ball population found and the center that attains it."""

    max_count: int
    witness_center: tuple[int, ...]
    mode: OracleMode
    centers_examined: int


def radius_to_rational(radius: float) -> Fraction:
    """Round a real radius down to a multiple of 1e-9 (never strengthens a claim)."""
    if radius <= 0:
        return Fraction(0)
    return Fraction(math.floor(radius * RADIUS_GRANULARITY), RADIUS_GRANULARITY)


def _ball_counts(code: LinearCode, centers: np.ndarray, rho: Fraction) -> np.ndarray:
    cw = code.codewords
    limit = rho.numerator * code.n
    counts = np.empty(len(centers), dtype=np.int64)
    step = max(1, _CELL_BUDGET // max(1, cw.shape[0] * code.n))
    for start in range(0, len(centers), step):
        chunk = centers[start : start + step]
        dist = (chunk[:, None, :] != cw[None, :, :]).sum(axis=-1)
        counts[start : start + step] = (dist * rho.denominator < limit).sum(axis=1)
    return counts


def _best(centers: np.ndarray, counts: np.ndarray) -> tuple[int, tuple[int, ...]]:
    top = int(counts.max())
    tied = centers[counts == top]
    # lexicographically least center among the maximizers
    order = np.lexsort(tied.T[::-1])
    return top, tuple(int(v) for v in tied[order[0]])


def _sampled_centers(
    code: LinearCode, rho: Fraction, budget: int, seed: int
) -> np.ndarray:
    rng = np.random.default_rng(seed & (2**64 - 1))
    q, n = code.q, code.n
    menu = [code.codewords[: min(code.size, budget)].astype(np.int64)]
    remaining = budget - len(menu[0])
    if remaining > 0:
        perturbed_count = remaining // 2
        flips = min(n, math.floor(rho * n))
        base = code.codewords[rng.integers(0, code.size, size=perturbed_count)].astype(
            np.int64
        )
        for row in base:
            coords = rng.choice(n, size=flips, replace=False)
            row[coords] = rng.integers(0, q, size=flips)
        menu.append(base)
        menu.append(rng.integers(0, q, size=(remaining - perturbed_count, n)))
    return np.concatenate(menu)


def list_size_at_radius(
    code: LinearCode,
    rho: Fraction,
    mode: OracleMode = "exhaustive",
    budget: int | None = None,
    seed: int = 0,
) -> ListOracleResult:
    """Maximum number of codewords strictly within relative radius rho of a center.

    Exhaustive mode scans all q**n centers in label order. Sampled mode scans
    ``budget`` centers (codewords, codewords with floor(rho*n) coordinates
    redrawn, then uniform centers) and reports a lower bound.

    Raises:
        InputError: rho outside [0, 1] or a zero budget
        BudgetError: q**n above MAX_CENTERS in exhaustive mode
    """
    rho = Fraction(rho)
    if not 0 <= rho <= 1:
        raise InputError(f"radius must lie in [0, 1], got {rho}")

    if mode == "exhaustive":
        total = code.q**code.n
        if total > MAX_CENTERS:
            raise BudgetError(
                f"q^n = {code.q}^{code.n} centers exceeds the budget {MAX_CENTERS}"
            )
        centers = messages(code.spec, code.n)
    elif mode == "sampled":
        if budget is None or budget < 1:
            raise InputError("sampled mode needs a positive center budget")
        centers = _sampled_centers(code, rho, budget, seed)
    else:
        raise InputError(f"unknown oracle mode {mode!r}")

    counts = _ball_counts(code, centers, rho)
    top, center = _best(centers, counts)
    logger.debug("oracle %s: rho=%s max=%d over %d centers", mode, rho, top, len(centers))
    return ListOracleResult(top, center, mode, len(centers))


def verify_list_decodable(
    code: LinearCode, rho: Fraction, ell: int
) -> tuple[bool, tuple[int, ...] | None]:
    """Whether every ball of radius < rho holds at most ell codewords, with a witness otherwise."""
    result = list_size_at_radius(code, rho, mode="exhaustive")
    if result.max_count <= ell:
        return True, None
    return False, result.witness_center
