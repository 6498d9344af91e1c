"""Linear codes over GF(q): generation, enumeration and distance quantities.

Codes are kept as the full message-indexed codeword table: row r of
``LinearCode.codewords`` is the encoding of message r (see gf.messages).
A rank-deficient generator therefore produces repeated rows, and every
count in this module is taken with that multiplicity.

All distances are exact ``Fraction`` values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, islice
from math import comb

import numpy as np

from .errors import BudgetError, InputError
from .gf import FieldSpec, field_for_order, field_make, inner_product_table, messages

logger = logging.getLogger(__name__)

MAX_CODEWORDS = 2**24
MAX_SUBSETS = 10**7
_SUBSET_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A ktilde x n generator matrix of labels over ``spec``."""

    spec: FieldSpec
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise InputError(f"generator must be a non-empty matrix, got {entries.shape}")
        if entries.min() < 0 or entries.max() >= self.spec.q:
            raise InputError(f"generator entries must lie in [0, {self.spec.q})")
        object.__setattr__(self, "entries", entries.astype(np.uint8))

    @property
    def ktilde(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Generator plus its q**ktilde codewords in message-label order."""

    gen: GeneratorMatrix
    codewords: np.ndarray

    @property
    def spec(self) -> FieldSpec:
        return self.gen.spec

    @property
    def q(self) -> int:
        return self.gen.spec.q

    @property
    def n(self) -> int:
        return self.gen.n

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    def codeword(self, message: int) -> np.ndarray:
        return self.codewords[message]


def _check_budget(spec: FieldSpec, ktilde: int) -> None:
    if spec.q**ktilde > MAX_CODEWORDS:
        raise BudgetError(
            f"q^ktilde = {spec.q}^{ktilde} exceeds the enumeration budget {MAX_CODEWORDS}"
        )


def random_generator(spec: FieldSpec, ktilde: int, n: int, seed: int) -> GeneratorMatrix:
    """Generator with i.i.d. uniform entries drawn from the seeded stream."""
    if ktilde < 1 or n < 1:
        raise InputError(f"need ktilde >= 1 and n >= 1, got ({ktilde}, {n})")
    _check_budget(spec, ktilde)
    rng = np.random.default_rng(seed & (2**64 - 1))
    entries = rng.integers(0, spec.q, size=(ktilde, n), dtype=np.int64)
    return GeneratorMatrix(spec, entries)


def enumerate_codewords(gen: GeneratorMatrix) -> LinearCode:
    """Encode every message x as x·G; codeword 0 is all zeros."""
    _check_budget(gen.spec, gen.ktilde)
    msgs = messages(gen.spec, gen.ktilde)
    words = inner_product_table(gen.spec, msgs, gen.entries.T)
    words.flags.writeable = False
    return LinearCode(gen, words)


def reed_muller_generator(m: int) -> GeneratorMatrix:
    """Binary first-order Reed–Muller generator: length 2**m, dimension m + 1."""
    if m < 1:
        raise InputError(f"Reed-Muller order parameter must be >= 1, got {m}")
    spec = field_make(2, 1)
    points = messages(spec, m)
    rows = [np.ones(2**m, dtype=np.uint8)] + [points[:, i] for i in range(m)]
    return GeneratorMatrix(spec, np.stack(rows))


def _as_words(words) -> np.ndarray:
    arr = np.asarray(words, dtype=np.int64)
    if arr.ndim != 2:
        raise InputError("expected a sequence of equal-length symbol vectors")
    return arr


def relative_distance(x, y) -> Fraction:
    """Fraction of positions where x and y differ."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise InputError("relative distance of empty words is undefined")
    return Fraction(int(np.count_nonzero(x != y)), x.size)


def pairwise_distance_counts(words) -> np.ndarray:
    """Matrix of Hamming distances (disagreement counts) between the rows of words."""
    arr = _as_words(words)
    return (arr[:, None, :] != arr[None, :, :]).sum(axis=-1)


def avg_pairwise_distance(words) -> Fraction:
    """Average relative distance over all pairs of the L given words."""
    arr = _as_words(words)
    L, n = arr.shape
    if L < 2:
        raise InputError(f"average pairwise distance needs L >= 2 words, got {L}")
    total = int(pairwise_distance_counts(arr).sum()) // 2
    return Fraction(total, n * comb(L, 2))


def min_avg_distance_over_subsets(
    code: LinearCode, L: int
) -> tuple[Fraction, tuple[int, ...]]:
    """Minimum average pairwise distance over every L-subset of message indices.

    Subsets are visited in lexicographic order, so the witness is the
    lexicographically least minimizer.

    Raises:
        InputError: L < 2 or L larger than the code
        BudgetError: more than MAX_SUBSETS subsets
    """
    if L < 2:
        raise InputError(f"subset size must be >= 2, got {L}")
    N = code.size
    if L > N:
        raise InputError(f"subset size {L} exceeds the {N} codewords")
    total_subsets = comb(N, L)
    if total_subsets > MAX_SUBSETS:
        raise BudgetError(
            f"C({N}, {L}) = {total_subsets} subsets exceeds the budget {MAX_SUBSETS}"
        )

    D = pairwise_distance_counts(code.codewords)
    pairs = list(combinations(range(L), 2))
    subsets = combinations(range(N), L)
    best_sum = None
    witness: tuple[int, ...] = ()
    while True:
        chunk = np.array(list(islice(subsets, _SUBSET_CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            break
        sums = np.zeros(len(chunk), dtype=np.int64)
        for a, b in pairs:
            sums += D[chunk[:, a], chunk[:, b]]
        i = int(np.argmin(sums))
        if best_sum is None or sums[i] < best_sum:
            best_sum = int(sums[i])
            witness = tuple(int(v) for v in chunk[i])

    logger.debug("min avg distance over %d subsets of size %d", total_subsets, L)
    return Fraction(best_sum, code.n * comb(L, 2)), witness


def _message_weights(code: LinearCode) -> np.ndarray:
    return np.count_nonzero(code.codewords, axis=1)


def min_distance(code: LinearCode) -> Fraction:
    """Minimum relative distance over distinct message pairs.

    By linearity d(c_x, c_y) = wt(c_{x-y}), so the minimum runs over the
    weights of nonzero messages; repeated codewords give 0.
    """
    if code.size < 2:
        raise InputError("minimum distance needs at least two codewords")
    return Fraction(int(_message_weights(code)[1:].min()), code.n)


def neighbor_count(code: LinearCode, eta: Fraction) -> int:
    """Codewords at relative distance < eta from a codeword, itself included.

    Every codeword of a linear code sees the same neighbourhood, so this
    is also the maximum over codewords.
    """
    eta = Fraction(eta)
    weights = _message_weights(code)
    return int(np.count_nonzero(weights * eta.denominator < eta.numerator * code.n))


def duplicate_count(code: LinearCode) -> int:
    """Number of message-indexed codewords that repeat an earlier one."""
    distinct = np.unique(code.codewords, axis=0).shape[0]
    return code.size - distinct


def parse_generator(text: str) -> GeneratorMatrix:
    """Read the `q ktilde n` header followed by ktilde rows of n labels."""
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 3:
        raise InputError("generator header must be `q ktilde n`")
    try:
        q, ktilde, n = (int(v) for v in lines[0])
        rows = [[int(v) for v in line] for line in lines[1:]]
    except ValueError as e:
        raise InputError(f"generator file holds a non-integer token: {e}") from e
    if len(rows) != ktilde or any(len(row) != n for row in rows):
        raise InputError(f"expected {ktilde} rows of {n} labels")
    return GeneratorMatrix(field_for_order(q), np.array(rows, dtype=np.int64))


def format_generator(gen: GeneratorMatrix) -> str:
    lines = [f"{gen.spec.q} {gen.ktilde} {gen.n}"]
    lines += [" ".join(str(int(v)) for v in row) for row in gen.entries]
    return "\n".join(lines) + "\n"
