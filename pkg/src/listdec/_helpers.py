from __future__ import annotations

import math
import os
from fractions import Fraction
from math import ceil
from typing import Sequence

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

num_to_blockchar = [" ", "▁", "▂", "▃", "▄", "▅", "▆", "▇", "█"]


def derive_seed(seed: int, index: int) -> int:
    """64-bit FNV-1a over the little-endian bytes of (seed, index).

    Both inputs are reduced to unsigned 64-bit integers first, so negative
    master seeds are accepted and map to their two's complement.
    """
    data = (seed & _MASK64).to_bytes(8, "little") + (index & _MASK64).to_bytes(
        8, "little"
    )
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def worker_count() -> int:
    """Number of trial workers, capped by LISTDEC_THREADS (0 or unset = auto)."""
    raw = os.environ.get("LISTDEC_THREADS", "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError:
        requested = 0
    if requested > 0:
        return requested

    import psutil

    return max(1, psutil.cpu_count(logical=False) or psutil.cpu_count() or 1)


def sci_fmt(value: float | int | Fraction) -> str:
    """Fixed scientific notation with 12 significant digits (CSV quantities)."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.11e}"


def fraction_fmt(value: Fraction) -> str:
    """Render an exact rational as `num/den` followed by its decimal value."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator} (≈{float(value):.6g})"


def duration_fmt(ms, fmt=".2f"):
    """Format a wall time with appropriate unit scaling (s, ms, µs)."""
    assert ms >= 0
    if ms >= 1000:
        string = f"{{:{fmt}}}".format(ms / 1000)
        return f"{string} s"
    elif ms >= 1:
        string = f"{{:{fmt}}}".format(ms)
        return f"{string} ms"
    string = f"{{:{fmt}}}".format(ms * 1000)
    return f"{string} µs"


def sparkline(values: Sequence[float], minval: float, maxval: float) -> str:
    """One-row block-character chart of a curve, one character per value."""
    chars = []
    span = maxval - minval
    if span <= 0:
        span = 1.0
    for value in values:
        if not math.isfinite(value):
            chars.append("?")
            continue
        k = ceil((value - minval) / span * 8)
        chars.append(num_to_blockchar[min(max(k, 0), 8)])
    return "".join(chars)
