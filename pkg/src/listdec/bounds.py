"""Closed-form list-decoding radii and the rate expression.

Radii are advisory doubles. Anything that certifies list decodability
converts them to exact rational cutoffs first (see oracle.radius_to_rational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import InputError

SLACK = 1e-12

Provenance = Literal["avg_johnson", "simplified", "deletion", "rip_to_ld"]


@dataclass(frozen=True)
class ListDecodingBound:
    """Every ball of relative radius < ``radius`` holds at most ``list_size`` codewords."""

    radius: float
    list_size: int
    provenance: Provenance


def _check_q(q: int) -> None:
    if q < 2:
        raise InputError(f"alphabet size must be >= 2, got {q}")


def _check_L(L: int, least: int = 2) -> None:
    if L < least:
        raise InputError(f"L must be >= {least}, got {L}")


def johnson_radius(q: int, x: float) -> float:
    """J_q(x) = (q-1)/q * (1 - sqrt(1 - q*x/(q-1))) on 0 <= x <= 1 - 1/q."""
    _check_q(q)
    top = 1 - 1 / q
    if x < -SLACK or x > top + SLACK:
        raise InputError(f"Johnson radius argument {x} outside [0, {top}]")
    x = min(max(x, 0.0), top)
    return top * (1 - math.sqrt(max(0.0, 1 - q * x / (q - 1))))


def avg_johnson_bound(q: int, delta: float, L: int) -> ListDecodingBound:
    """Radius from an average-distance lower bound delta on every L-subset.

    Averages of L words can exceed 1 - 1/q (two antipodal words average 1),
    so delta is accepted as long as delta*(1 - 1/L) stays in the domain of J_q.
    """
    _check_L(L)
    if delta < 0:
        raise InputError(f"average distance must be >= 0, got {delta}")
    return ListDecodingBound(johnson_radius(q, delta * (1 - 1 / L)), L - 1, "avg_johnson")


def simplified_johnson(q: int, eps: float, L: int) -> ListDecodingBound:
    """(1-1/q)(1 - sqrt(eps + 1/L)) for average distance (1-1/q)(1-eps)."""
    _check_q(q)
    _check_L(L)
    if not 0 <= eps <= 1:
        raise InputError(f"eps must lie in [0, 1], got {eps}")
    if eps + 1 / L > 1 + SLACK:
        raise InputError(f"eps + 1/L = {eps + 1 / L} exceeds 1")
    radius = (1 - 1 / q) * (1 - math.sqrt(min(1.0, eps + 1 / L)))
    return ListDecodingBound(radius, L - 1, "simplified")


def deletion_bound(q: int, eta: float, A: int, L: int) -> ListDecodingBound:
    """Radius J_q(eta - eta/L) and list size A*L - 1 for locally sparse codes.

    The code must have at most A codewords (itself included) at relative
    distance < eta from every codeword.
    """
    _check_q(q)
    _check_L(L)
    if A < 1:
        raise InputError(f"A must be >= 1, got {A}")
    if not 0 < eta <= 1 - 1 / q + SLACK:
        raise InputError(f"eta must lie in (0, {1 - 1 / q}], got {eta}")
    return ListDecodingBound(johnson_radius(q, eta - eta / L), A * L - 1, "deletion")


def deletion_avg_distance(eta: float, A: int, L: int) -> float:
    """Average-distance floor A(L-1)eta/(AL-1) of every AL-subset of a locally sparse code."""
    _check_L(L)
    if A < 1:
        raise InputError(f"A must be >= 1, got {A}")
    return A * (L - 1) * eta / (A * L - 1)


def rip_distance_threshold(q: int, L: int) -> float:
    """Average distance (1-1/q)(1 - 1/(2(L-1))) implied by RIP of order L, constant 1/2."""
    _check_q(q)
    _check_L(L)
    return (1 - 1 / q) * (1 - 1 / (2 * (L - 1)))


def rip_to_ld_radius(q: int, L: int) -> ListDecodingBound:
    """(1-1/q)(1 - sqrt(1.5/(L-1))) with list size L-1."""
    _check_q(q)
    _check_L(L, least=3)
    radius = (1 - 1 / q) * (1 - math.sqrt(1.5 / (L - 1)))
    return ListDecodingBound(radius, L - 1, "rip_to_ld")


def main_rate_bound(q: int, eps: float, gamma: float) -> float:
    """eps^2 / (log2(1/gamma) * log2(q/eps)^3 * log2(q)), each log clamped below at 1.

    The leading constant is normalized to 1; this is the rate expression up
    to an unspecified absolute constant, not a certified rate.
    """
    _check_q(q)
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < gamma < 1:
        raise InputError(f"gamma must lie in (0, 1), got {gamma}")

    def clamped_log2(v: float) -> float:
        return max(1.0, math.log2(v))

    denominator = (
        clamped_log2(1 / gamma) * clamped_log2(q / eps) ** 3 * clamped_log2(q)
    )
    return eps**2 / denominator
