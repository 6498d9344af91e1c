"""Lin matrices, row subsampling and RIP-2 constants of complex matrices.

The RIP constant of order k is computed support by support: for a support S
the constant is max(lambda_max - 1, 1 - lambda_min) of the normalized k x k
Gram block. When M^H M is real, real test vectors suffice, so every block is
a real symmetric eigenproblem; realness is checked, not assumed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import Literal

import numpy as np

from ._helpers import derive_seed
from .errors import BudgetError, InputError
from .gf import FieldSpec, inner_product_table, labels_to_vectors, messages
from .simplex import ComplexMatrix, phi_matrix

logger = logging.getLogger(__name__)

MAX_LIN_SIZE = 2**13
MAX_SUPPORTS = 10**7
REAL_TOLERANCE = 1e-9
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 50
SUCCESS_THRESHOLD = 0.9
SEARCH_CAP_FACTOR = 16
_MAX_GREEDY_PASSES = 100
_BATCH_CELLS = 1 << 20

RipMethod = Literal["exact", "sampled"]


@dataclass(frozen=True)
class RipReport:
    """RIP constant estimate of order k with the support attaining it."""

    k: int
    delta: float
    witness_support: tuple[int, ...]
    method: RipMethod
    supports_examined: int


@dataclass(frozen=True, eq=False)
class SampledRows:
    """Multiset of Lin row indices, drawn with replacement."""

    T: np.ndarray
    seed: int

    def __post_init__(self):
        T = np.asarray(self.T, dtype=np.int64)
        if T.ndim != 1 or T.size < 1:
            raise InputError("row multiset must hold at least one index")
        object.__setattr__(self, "T", T)

    def __len__(self) -> int:
        return self.T.size


@dataclass(frozen=True)
class RowSearch:
    """Least |T| reaching the success threshold, plus every probe made on the way."""

    rows: int
    probes: list[tuple[int, float]] = field(default_factory=list)


def _lin_size(spec: FieldSpec, ktilde: int) -> int:
    if ktilde < 1:
        raise InputError(f"ktilde must be >= 1, got {ktilde}")
    N = spec.q**ktilde
    if N > MAX_LIN_SIZE:
        raise BudgetError(f"q^ktilde = {N} exceeds the Lin budget {MAX_LIN_SIZE}")
    return N


def lin_matrix(spec: FieldSpec, ktilde: int) -> np.ndarray:
    """Labels of the inner products <x, y> over all pairs of messages."""
    _lin_size(spec, ktilde)
    msgs = messages(spec, ktilde)
    return inner_product_table(spec, msgs, msgs)


def sample_T(spec: FieldSpec, ktilde: int, size: int, seed: int) -> SampledRows:
    """Draw ``size`` row indices uniformly with replacement."""
    N = _lin_size(spec, ktilde)
    if size < 1:
        raise InputError(f"row sample size must be >= 1, got {size}")
    rng = np.random.default_rng(seed & (2**64 - 1))
    return SampledRows(rng.integers(0, N, size=size, dtype=np.int64), seed)


def phi_lin_sub(spec: FieldSpec, ktilde: int, T: SampledRows | np.ndarray) -> ComplexMatrix:
    """phi(Lin_T): one group of q-1 rows per element of T, one column per message."""
    N = _lin_size(spec, ktilde)
    rows = T.T if isinstance(T, SampledRows) else np.asarray(T, dtype=np.int64)
    if rows.size < 1 or rows.min() < 0 or rows.max() >= N:
        raise InputError(f"row indices must lie in [0, {N})")
    msgs = messages(spec, ktilde)
    words = inner_product_table(spec, labels_to_vectors(spec, rows, ktilde), msgs)
    return phi_matrix(words, spec.q)


def subsample_rows(U: ComplexMatrix, T) -> ComplexMatrix:
    """Rows T of an arbitrary matrix, each row its own group."""
    rows = np.asarray(T, dtype=np.int64)
    if rows.size < 1 or rows.min() < 0 or rows.max() >= U.rows:
        raise InputError(f"row indices must lie in [0, {U.rows})")
    return ComplexMatrix(U.entries[rows], np.arange(rows.size))


def load_matrix(text: str) -> ComplexMatrix:
    """Parse `rows cols` followed by rows*cols row-major `re im` pairs."""
    tokens = text.split()
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        values = np.array([float(v) for v in tokens[2:]])
    except (IndexError, ValueError) as e:
        raise InputError(f"malformed matrix file: {e}") from e
    if values.size != 2 * rows * cols:
        raise InputError(f"expected {rows * cols} (re, im) pairs, got {values.size / 2:g}")
    pairs = values.reshape(rows * cols, 2)
    return ComplexMatrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols))


def dump_matrix(M: ComplexMatrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    for row in M.entries:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def jacobi_eigh(
    stack: np.ndarray,
    tol: float = JACOBI_TOLERANCE,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a stack of real symmetric matrices by cyclic Jacobi rotations.

    Every matrix in the stack goes through the same (p, q) schedule with its
    own rotation angle. Sweeps stop once every off-diagonal Frobenius norm is
    at most ``tol`` or after ``max_sweeps``.

    Returns:
        (eigenvalues, eigenvectors): ascending eigenvalues of shape (..., k)
        and the matching eigenvectors as columns, shape (..., k, k)
    """
    A = np.array(stack, dtype=np.float64)
    single = A.ndim == 2
    if single:
        A = A[None]
    if A.shape[-1] != A.shape[-2]:
        raise InputError(f"matrices must be square, got {A.shape[-2:]}")
    k = A.shape[-1]
    V = np.broadcast_to(np.eye(k), A.shape).copy()
    off_mask = ~np.eye(k, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt((A[:, off_mask] ** 2).sum(axis=-1)) if k > 1 else np.zeros(1)
        if off.max(initial=0.0) <= tol:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = A[:, p, q]
                active = apq != 0.0
                if not active.any():
                    continue
                theta = 0.5 * np.arctan2(2 * apq, A[:, q, q] - A[:, p, p])
                c = np.where(active, np.cos(theta), 1.0)[:, None]
                s = np.where(active, np.sin(theta), 0.0)[:, None]

                col_p, col_q = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = c * col_p - s * col_q
                A[:, :, q] = s * col_p + c * col_q
                row_p, row_q = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = c * row_p - s * row_q
                A[:, q, :] = s * row_p + c * row_q
                A[active, p, q] = 0.0
                A[active, q, p] = 0.0

                vec_p, vec_q = V[:, :, p].copy(), V[:, :, q].copy()
                V[:, :, p] = c * vec_p - s * vec_q
                V[:, :, q] = s * vec_p + c * vec_q

    eigvals = np.diagonal(A, axis1=-2, axis2=-1).copy()
    order = np.argsort(eigvals, axis=-1, kind="stable")
    eigvals = np.take_along_axis(eigvals, order, axis=-1)
    V = np.take_along_axis(V, order[:, None, :], axis=-1)
    if single:
        return eigvals[0], V[0]
    return eigvals, V


def _deltas(eigvals: np.ndarray) -> np.ndarray:
    return np.maximum(eigvals[..., -1] - 1.0, 1.0 - eigvals[..., 0])


def _check_real(block: np.ndarray) -> np.ndarray:
    if np.abs(block.imag).max(initial=0.0) > REAL_TOLERANCE:
        raise InputError("Gram matrix is not real; real test vectors do not suffice")
    return block.real


def _normalized_gram(M: ComplexMatrix, normalizer: float) -> np.ndarray:
    if normalizer <= 0:
        raise InputError(f"column normalizer must be positive, got {normalizer}")
    G = _check_real(M.gram(normalizer))
    return (G + G.T) / 2


def _check_order(M: ComplexMatrix, k: int) -> None:
    if not 1 <= k <= M.cols:
        raise InputError(f"order k must lie in [1, {M.cols}], got {k}")


def support_delta(
    M: ComplexMatrix, support, normalizer: float
) -> tuple[float, np.ndarray]:
    """Constant of one support and a unit vector (on that support) attaining it."""
    S = np.asarray(sorted(int(v) for v in support), dtype=np.int64)
    E = M.entries[:, S] / normalizer
    block = _check_real(E.conj().T @ E)
    vals, vecs = jacobi_eigh((block + block.T) / 2)
    upper, lower = vals[-1] - 1.0, 1.0 - vals[0]
    direction = vecs[:, -1] if upper >= lower else vecs[:, 0]
    x = np.zeros(M.cols)
    x[S] = direction
    return float(max(upper, lower)), x


def rip_constant_exact(M: ComplexMatrix, k: int, column_normalizer: float) -> RipReport:
    """Maximum support constant over every k-subset of columns.

    Raises:
        InputError: non-real normalized Gram or k out of range
        BudgetError: more than MAX_SUPPORTS supports
    """
    _check_order(M, k)
    total = math.comb(M.cols, k)
    if total > MAX_SUPPORTS:
        raise BudgetError(f"C({M.cols}, {k}) = {total} supports exceeds {MAX_SUPPORTS}")
    G = _normalized_gram(M, column_normalizer)

    best_delta = -1.0
    witness: tuple[int, ...] = ()
    supports = combinations(range(M.cols), k)
    batch = max(1, _BATCH_CELLS // (k * k))
    while True:
        idx = np.array(list(islice(supports, batch)), dtype=np.int64)
        if idx.size == 0:
            break
        sub = G[idx[:, :, None], idx[:, None, :]]
        deltas = _deltas(jacobi_eigh(sub)[0])
        i = int(np.argmax(deltas))
        if deltas[i] > best_delta:
            best_delta = float(deltas[i])
            witness = tuple(int(v) for v in idx[i])

    logger.debug("exact RIP order %d: delta=%.6g over %d supports", k, best_delta, total)
    return RipReport(k, max(best_delta, 0.0), witness, "exact", total)


def _greedy_support(
    E: np.ndarray, diag: np.ndarray, S: np.ndarray
) -> tuple[float, np.ndarray, int]:
    """Single-column swaps from S until no swap raises the support constant."""
    N = E.shape[1]
    k = S.size
    examined = 1
    block = _check_real(E[:, S].conj().T @ E)
    current = float(_deltas(jacobi_eigh((block[:, S] + block[:, S].T) / 2)[0]))

    for _ in range(_MAX_GREEDY_PASSES):
        outside = np.setdiff1d(np.arange(N), S)
        if outside.size == 0:
            break
        G_SS = (block[:, S] + block[:, S].T) / 2
        candidates = []
        for i in range(k):
            sub = np.broadcast_to(G_SS, (outside.size, k, k)).copy()
            sub[:, i, :] = block[:, outside].T
            sub[:, :, i] = block[:, outside].T
            sub[:, i, i] = diag[outside]
            candidates.append(sub)
        stack = np.concatenate(candidates)
        deltas = _deltas(jacobi_eigh(stack)[0])
        examined += deltas.size
        j = int(np.argmax(deltas))
        if deltas[j] <= current + JACOBI_TOLERANCE:
            break
        position, column = divmod(j, outside.size)
        S = np.sort(np.concatenate([np.delete(S, position), [outside[column]]]))
        current = float(deltas[j])
        block = _check_real(E[:, S].conj().T @ E)

    return current, S, examined


def rip_constant_sampled(
    M: ComplexMatrix, k: int, normalizer: float, trials: int, seed: int
) -> RipReport:
    """Lower bound on the RIP constant from random supports refined by greedy swaps.

    Trial t starts from a support drawn with seed derive_seed(seed, t), so the
    report for ``trials`` is a running maximum over a fixed prefix of starts.
    """
    _check_order(M, k)
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    if normalizer <= 0:
        raise InputError(f"column normalizer must be positive, got {normalizer}")

    E = M.entries / normalizer
    diag = (np.abs(E) ** 2).sum(axis=0)
    best_delta = -1.0
    witness: tuple[int, ...] = ()
    examined = 0
    for t in range(trials):
        rng = np.random.default_rng(derive_seed(seed, t))
        start = np.sort(rng.choice(M.cols, size=k, replace=False))
        delta, S, count = _greedy_support(E, diag, start)
        examined += count
        if delta > best_delta:
            best_delta = delta
            witness = tuple(int(v) for v in S)

    return RipReport(k, max(best_delta, 0.0), witness, "sampled", examined)


def _rip_of_rows(
    spec: FieldSpec,
    ktilde: int,
    k: int,
    rows: SampledRows,
    rip_mode: RipMethod,
    rip_trials: int,
) -> RipReport:
    M = phi_lin_sub(spec, ktilde, rows)
    normalizer = math.sqrt((spec.q - 1) * len(rows))
    if rip_mode == "exact":
        return rip_constant_exact(M, k, normalizer)
    return rip_constant_sampled(M, k, normalizer, rip_trials, derive_seed(rows.seed, 1))


def rip_success_probability(
    spec: FieldSpec,
    ktilde: int,
    k: int,
    rows: int,
    delta_target: float,
    confidence_trials: int,
    seed: int,
    rip_mode: RipMethod = "sampled",
    rip_trials: int = 8,
) -> float:
    """Fraction of independent row multisets of size ``rows`` meeting delta_target."""
    if confidence_trials < 1:
        raise InputError(f"confidence trials must be >= 1, got {confidence_trials}")
    successes = 0
    for j in range(confidence_trials):
        T = sample_T(spec, ktilde, rows, derive_seed(derive_seed(seed, rows), j))
        report = _rip_of_rows(spec, ktilde, k, T, rip_mode, rip_trials)
        successes += report.delta <= delta_target
    return successes / confidence_trials


def min_rows_for_rip(
    spec: FieldSpec,
    ktilde: int,
    k: int,
    delta_target: float,
    confidence_trials: int,
    seed: int,
    rip_mode: RipMethod = "sampled",
    rip_trials: int = 8,
    threshold: float = SUCCESS_THRESHOLD,
) -> RowSearch:
    """Least |T| found by bisection whose empirical RIP success probability reaches ``threshold``.

    Doubles |T| from 1 until a probe succeeds, then bisects between the last
    failing and the first succeeding size. Probes are cached, and every probe
    uses seeds derived from (seed, |T|), so the result depends only on the
    arguments.

    The empirical probability is not monotone in |T| (a size can succeed
    while the next one fails), so the result is a succeeding size whose
    predecessor was probed and failed. It is not necessarily the global least
    succeeding size.

    Raises:
        BudgetError: no success up to |T| = 16 * q**ktilde, or Lin too large
    """
    N = _lin_size(spec, ktilde)
    cap = SEARCH_CAP_FACTOR * N
    cache: dict[int, float] = {}

    def probability(rows: int) -> float:
        if rows not in cache:
            cache[rows] = rip_success_probability(
                spec, ktilde, k, rows, delta_target, confidence_trials, seed,
                rip_mode, rip_trials,
            )
            logger.debug("|T|=%d: success probability %.3f", rows, cache[rows])
        return cache[rows]

    lo, hi = 0, 1
    while probability(hi) < threshold:
        if hi >= cap:
            raise BudgetError(
                f"no |T| <= {cap} reached success probability {threshold} "
                f"for delta <= {delta_target}"
            )
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probability(mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return RowSearch(hi, sorted(cache.items()))


def empirical_delta_expectation(
    spec: FieldSpec,
    ktilde: int,
    k: int,
    rows: int,
    trials: int,
    seed: int,
    rip_mode: RipMethod = "sampled",
    rip_trials: int = 8,
) -> tuple[float, float]:
    """Monte Carlo mean and standard deviation of the RIP constant at a fixed |T|."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    deltas = []
    for j in range(trials):
        T = sample_T(spec, ktilde, rows, derive_seed(seed, j))
        deltas.append(_rip_of_rows(spec, ktilde, k, T, rip_mode, rip_trials).delta)
    values = np.array(deltas)
    return float(values.mean()), float(values.std())
