"""Finite-field arithmetic over GF(q) for prime powers q <= 256.

Elements are identified with integer labels in [0, q): an element whose
coefficient vector over GF(p) is (c_{m-1}, ..., c_0) has label sum(c_i * p**i).
Label 0 is the additive identity and label 1 the multiplicative identity.
Addition works digit-wise mod p; multiplication goes through exp/log tables
built from a primitive element once per field.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .errors import InputError

logger = logging.getLogger(__name__)

MAX_FIELD_SIZE = 256

FieldOp = Literal["add", "mul", "neg", "inv"]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial b over GF(p), low-to-high lists."""
    a = [c % p for c in a]
    while len(a) >= len(b):
        coef = a[-1]
        if coef:
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] = (a[shift + i] - coef * bc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _monic_polys(p: int, degree: int):
    for r in range(p**degree):
        low = [(r // p**i) % p for i in range(degree)]
        yield low + [1]


def _is_irreducible(poly: list[int], p: int) -> bool:
    degree = len(poly) - 1
    for d in range(1, degree // 2 + 1):
        for factor in _monic_polys(p, d):
            if not _poly_rem(poly, factor, p):
                return False
    return True


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, ac in enumerate(a):
        if ac == 0:
            continue
        for j, bc in enumerate(b):
            prod[i + j] = (prod[i + j] + ac * bc) % p
    return _poly_rem(prod, modulus, p)


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(p**m) with its modulus and precomputed lookup tables.

    The modulus is stored low-to-high and is monic of degree m. For prime
    fields (m == 1) it is x and plays no role in the arithmetic.
    """

    p: int
    m: int
    q: int
    modulus: tuple[int, ...]
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def element(self, label: int) -> FieldElem:
        return FieldElem(self, int(label))

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    def modulus_str(self) -> str:
        """Human readable modulus, e.g. ``x^2 + x + 1``."""
        terms = []
        for power in range(len(self.modulus) - 1, -1, -1):
            c = self.modulus[power]
            if c == 0:
                continue
            coef = "" if (c == 1 and power > 0) else str(c)
            if power == 0:
                terms.append(str(c))
            elif power == 1:
                terms.append(f"{coef}x")
            else:
                terms.append(f"{coef}x^{power}")
        return " + ".join(terms)


@dataclass(frozen=True)
class FieldElem:
    """A field element: a label in [0, q) bound to its FieldSpec."""

    spec: FieldSpec
    label: int

    def __post_init__(self):
        if not 0 <= self.label < self.spec.q:
            raise InputError(f"label {self.label} outside [0, {self.spec.q})")

    def _check(self, other: FieldElem) -> None:
        if not isinstance(other, FieldElem) or other.spec != self.spec:
            raise InputError("field elements belong to different fields")

    def __add__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.spec, int(self.spec.add_table[self.label, other.label]))

    def __sub__(self, other: FieldElem) -> FieldElem:
        return self + (-other)

    def __mul__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.spec, int(self.spec.mul_table[self.label, other.label]))

    def __neg__(self) -> FieldElem:
        return FieldElem(self.spec, int(self.spec.neg_table[self.label]))

    def inverse(self) -> FieldElem:
        if self.label == 0:
            raise InputError("zero has no multiplicative inverse")
        return FieldElem(self.spec, int(self.spec.inv_table[self.label]))

    def __truediv__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return self * other.inverse()

    def __int__(self) -> int:
        return self.label


@lru_cache(maxsize=None)
def field_make(p: int, m: int = 1) -> FieldSpec:
    """Build GF(p**m) with the lexicographically least irreducible monic modulus.

    Candidates are scanned in order of the label of their lower coefficients,
    which is lexicographic order on (c_{m-1}, ..., c_0).

    Raises:
        InputError: p is not prime, m < 1, or p**m exceeds 256
    """
    if not isinstance(p, int) or not _is_prime(p):
        raise InputError(f"characteristic {p} is not prime")
    if not isinstance(m, int) or m < 1:
        raise InputError(f"extension degree must be >= 1, got {m}")
    q = p**m
    if q > MAX_FIELD_SIZE:
        raise InputError(f"field size {q} exceeds {MAX_FIELD_SIZE}")

    if m == 1:
        modulus = [0, 1]
    else:
        modulus = next(
            poly for poly in _monic_polys(p, m) if _is_irreducible(poly, p)
        )

    powers = p ** np.arange(m)
    digits = (np.arange(q)[:, None] // powers[None, :]) % p

    add_table = (((digits[:, None, :] + digits[None, :, :]) % p) * powers).sum(-1)
    neg_table = (((-digits) % p) * powers).sum(-1)

    def to_poly(label: int) -> list[int]:
        return [int(c) for c in digits[label]]

    def to_label(poly: list[int]) -> int:
        return sum(int(c) * p**i for i, c in enumerate(poly))

    # primitive element: the first label whose powers reach every nonzero element
    exp_table = np.zeros(q - 1, dtype=np.int64)
    for g in range(1, q):
        exp_table[0] = 1
        current = [1]
        order = q - 1
        for i in range(1, q - 1):
            current = _poly_mulmod(current, to_poly(g), modulus, p)
            exp_table[i] = to_label(current)
            if exp_table[i] == 1:
                order = i
                break
        if order == q - 1:
            break
    log_table = np.zeros(q, dtype=np.int64)
    log_table[exp_table] = np.arange(q - 1)

    labels = np.arange(q)
    log_sum = (log_table[:, None] + log_table[None, :]) % (q - 1)
    mul_table = exp_table[log_sum]
    mul_table[0, :] = 0
    mul_table[:, 0] = 0
    inv_table = np.zeros(q, dtype=np.int64)
    inv_table[1:] = exp_table[(-log_table[labels[1:]]) % (q - 1)]

    tables = {}
    for name, table in (
        ("add_table", add_table),
        ("mul_table", mul_table),
        ("neg_table", neg_table),
        ("inv_table", inv_table),
    ):
        table = np.ascontiguousarray(table, dtype=np.uint8)
        table.flags.writeable = False
        tables[name] = table
    exp_table.flags.writeable = False
    log_table.flags.writeable = False

    spec = FieldSpec(
        p=p,
        m=m,
        q=q,
        modulus=tuple(modulus),
        exp_table=exp_table,
        log_table=log_table,
        **tables,
    )
    logger.debug("built GF(%d) with modulus %s", q, spec.modulus_str())
    return spec


def field_for_order(q: int) -> FieldSpec:
    """Field of order q, factoring q as a prime power."""
    if not isinstance(q, int) or q < 2:
        raise InputError(f"field order must be an integer >= 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            rest = q
            while rest % p == 0:
                rest //= p
                m += 1
            if rest != 1:
                raise InputError(f"{q} is not a prime power")
            return field_make(p, m)
    raise InputError(f"{q} is not a prime power")


def field_arith(a: FieldElem, b: FieldElem | None, op: FieldOp) -> FieldElem:
    """Apply one of add, mul, neg, inv; the unary operations ignore b."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise InputError(f"unknown field operation {op!r}")


def inner_product(x: Sequence[FieldElem], y: Sequence[FieldElem]) -> FieldElem:
    """Sum of x_i * y_i in GF(q)."""
    if len(x) != len(y):
        raise InputError(f"length mismatch: {len(x)} != {len(y)}")
    if not x:
        raise InputError("inner product of empty sequences has no field")
    total = x[0].spec.zero
    for a, b in zip(x, y):
        total = total + a * b
    return total


def messages(spec: FieldSpec, length: int) -> np.ndarray:
    """All vectors of GF(q)^length in label order, as a (q**length, length) array.

    Message index r corresponds to the base-q digits of r with the first
    coordinate most significant, so index order is lexicographic order.
    """
    count = spec.q**length
    powers = spec.q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return ((np.arange(count, dtype=np.int64)[:, None] // powers) % spec.q).astype(
        np.uint8
    )


def vectors_to_labels(spec: FieldSpec, vectors: np.ndarray) -> np.ndarray:
    """Inverse of :func:`messages`: message index of each row."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    length = vectors.shape[1]
    powers = spec.q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return vectors @ powers


def labels_to_vectors(spec: FieldSpec, labels, length: int) -> np.ndarray:
    """Rows of :func:`messages` for the given message indices."""
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if labels.size and (labels.min() < 0 or labels.max() >= spec.q**length):
        raise InputError(f"message index outside [0, {spec.q**length})")
    powers = spec.q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] // powers) % spec.q).astype(np.uint8)


def inner_product_table(spec: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Label matrix of <a_i, b_j> over GF(q) for the rows of a and b."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape[1] != b.shape[1]:
        raise InputError(f"vector length mismatch: {a.shape[1]} != {b.shape[1]}")
    acc = np.zeros((a.shape[0], b.shape[0]), dtype=np.uint8)
    for i in range(a.shape[1]):
        prod = spec.mul_table[a[:, i][:, None], b[:, i][None, :]]
        acc = spec.add_table[acc, prod]
    return acc
