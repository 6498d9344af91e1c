"""The simplex encoding of q-ary symbols as complex root-of-unity vectors.

A symbol x in {0, ..., q-1} maps to (w^(x*a))_{a=1..q-1} with w = exp(2*pi*i/q),
using the integer product x*a of labels. Two encodings have inner product
q-1 when the symbols agree and -1 otherwise, which turns Hamming distance
into a linear-algebraic quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import LinearCode
from .errors import BudgetError, InputError, NumericalError

MAX_ENTRIES = 2**26
SNAP_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Dense complex matrix with optional row-group labels.

    ``groups[r]`` names the group row r belongs to; encodings of label
    matrices group the q-1 rows produced by one coordinate together.
    """

    entries: np.ndarray
    groups: np.ndarray | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise InputError(f"matrix must be two-dimensional, got {entries.shape}")
        if not np.isfinite(entries).all():
            raise InputError("matrix holds NaN or infinite entries")
        object.__setattr__(self, "entries", entries)
        if self.groups is not None:
            groups = np.asarray(self.groups, dtype=np.int64)
            if groups.shape != (entries.shape[0],):
                raise InputError("row grouping must label every row")
            object.__setattr__(self, "groups", groups)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def group_count(self) -> int:
        if self.groups is None:
            return 0
        return int(np.unique(self.groups).size)

    def gram(self, normalizer: float = 1.0) -> np.ndarray:
        """M^H M / normalizer**2."""
        return (self.entries.conj().T @ self.entries) / normalizer**2


@lru_cache(maxsize=None)
def roots_of_unity(q: int) -> np.ndarray:
    """w**r for r in [0, q), each evaluated from the closed form."""
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    roots.flags.writeable = False
    return roots


def _check_q(q: int) -> None:
    if q < 2:
        raise InputError(f"alphabet size must be >= 2, got {q}")


def _check_labels(labels: np.ndarray, q: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= q):
        raise InputError(f"labels must lie in [0, {q})")
    return labels


def phi_symbol(x: int, q: int) -> np.ndarray:
    _check_q(q)
    if not 0 <= x < q:
        raise InputError(f"label {x} outside [0, {q})")
    alphas = np.arange(1, q)
    return roots_of_unity(q)[(x * alphas) % q]


def simplex_inner(x: int, y: int, q: int) -> int:
    """<phi(x), phi(y)>, snapped to q-1 or -1."""
    value = complex(np.vdot(phi_symbol(y, q), phi_symbol(x, q)))
    expected = q - 1 if x == y else -1
    if abs(value - expected) > SNAP_TOLERANCE:
        raise NumericalError(f"inner product {value} does not snap to {expected}")
    return expected


def phi_vector(v, q: int) -> np.ndarray:
    """Coordinate-wise encoding; coordinate i occupies entries i*(q-1) .. i*(q-1)+q-2."""
    _check_q(q)
    v = _check_labels(v, q)
    alphas = np.arange(1, q)
    return roots_of_unity(q)[(v[:, None] * alphas[None, :]) % q].reshape(-1)


def phi_matrix(M, q: int) -> ComplexMatrix:
    """Encode every column of an n x N label matrix into an n(q-1) x N matrix."""
    _check_q(q)
    M = _check_labels(M, q)
    if M.ndim != 2:
        raise InputError("label matrix must be two-dimensional")
    n, N = M.shape
    if n * (q - 1) * N > MAX_ENTRIES:
        raise BudgetError(f"encoding would hold {n * (q - 1) * N} entries (> {MAX_ENTRIES})")
    alphas = np.arange(1, q)
    entries = roots_of_unity(q)[(M[:, None, :] * alphas[None, :, None]) % q]
    groups = np.repeat(np.arange(n), q - 1)
    return ComplexMatrix(entries.reshape(n * (q - 1), N), groups)


def phi_code(code: LinearCode) -> ComplexMatrix:
    """phi(C): column r is the encoding of the codeword of message r."""
    return phi_matrix(code.codewords.T, code.q)


def avg_dist_via_norm(words, q: int) -> float:
    """Average pairwise relative distance through the norm of the summed encodings."""
    arr = _check_labels(words, q)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise InputError("need at least two equal-length words")
    L, n = arr.shape
    total = phi_matrix(arr.T, q).entries.sum(axis=1)
    norm_sq = float(np.vdot(total, total).real)
    return (L * L * (q - 1) * n - norm_sq) / (q * L * (L - 1) * n)
