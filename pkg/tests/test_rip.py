import math

import numpy as np
import pytest

from listdec import codes, rip
from listdec.chaining import random_sparse_unit
from listdec.errors import BudgetError, InputError
from listdec.gf import field_for_order, vectors_to_labels
from listdec.simplex import ComplexMatrix, phi_code, phi_matrix


def _full(q, ktilde):
    spec = field_for_order(q)
    N = q**ktilde
    M = rip.phi_lin_sub(spec, ktilde, np.arange(N))
    return M, math.sqrt((q - 1) * N)


def test_lin_matrix_binary():
    spec = field_for_order(2)
    lin = rip.lin_matrix(spec, 2)
    assert lin.tolist() == [[0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]]


def test_phi_lin_is_hadamard_for_binary():
    M, _ = _full(2, 3)
    assert np.allclose(M.entries.real @ M.entries.real.T, 8 * np.eye(8))
    assert np.allclose(M.entries, phi_matrix(rip.lin_matrix(field_for_order(2), 3), 2).entries)


@pytest.mark.parametrize("q,ktilde", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_full_matrix_rip_is_zero_at_every_order(q, ktilde):
    M, normalizer = _full(q, ktilde)
    for k in range(1, M.cols + 1):
        report = rip.rip_constant_exact(M, k, normalizer)
        assert report.delta < 1e-9
        assert report.supports_examined == math.comb(M.cols, k)


def test_full_matrix_rip_q3_ktilde3():
    M, normalizer = _full(3, 3)
    for k in (1, 2, 3, M.cols):
        assert rip.rip_constant_exact(M, k, normalizer).delta < 1e-9


def test_duplicate_columns_break_rip():
    entries = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    report = rip.rip_constant_exact(ComplexMatrix(entries), 2, 1.0)
    assert report.delta == pytest.approx(1.0)
    assert report.witness_support == (0, 1)


def test_support_delta_direction():
    rng = np.random.default_rng(3)
    M = ComplexMatrix(rng.standard_normal((6, 5)) / math.sqrt(6))
    delta, x = rip.support_delta(M, (4, 1, 2), 1.0)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert np.flatnonzero(x).tolist() == [1, 2, 4]
    energy = np.linalg.norm(M.entries @ x) ** 2
    assert abs(energy - 1) == pytest.approx(delta)


def test_sampled_is_lower_bound_and_seeded():
    rng = np.random.default_rng(11)
    M = ComplexMatrix(rng.standard_normal((8, 10)) / math.sqrt(8))
    exact = rip.rip_constant_exact(M, 3, 1.0)
    sampled = rip.rip_constant_sampled(M, 3, 1.0, trials=4, seed=99)
    assert sampled.delta <= exact.delta + 1e-12
    assert sampled == rip.rip_constant_sampled(M, 3, 1.0, trials=4, seed=99)
    assert sampled.method == "sampled"
    assert len(sampled.witness_support) == 3


def test_non_real_gram_is_rejected():
    M = ComplexMatrix(np.array([[1, 1j], [0, 1]]))
    with pytest.raises(InputError):
        rip.rip_constant_exact(M, 2, 1.0)


def test_rip_errors(monkeypatch):
    M, normalizer = _full(2, 2)
    with pytest.raises(InputError):
        rip.rip_constant_exact(M, 0, normalizer)
    with pytest.raises(InputError):
        rip.rip_constant_exact(M, 5, normalizer)
    with pytest.raises(InputError):
        rip.rip_constant_sampled(M, 2, normalizer, trials=0, seed=1)
    monkeypatch.setattr(rip, "MAX_SUPPORTS", 3)
    with pytest.raises(BudgetError):
        rip.rip_constant_exact(M, 2, normalizer)


def test_lin_budget():
    with pytest.raises(BudgetError):
        rip.lin_matrix(field_for_order(2), 14)


def test_jacobi_matches_numpy():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((20, 5, 5))
    A = A + A.transpose(0, 2, 1)
    vals, vecs = rip.jacobi_eigh(A)
    assert np.allclose(vals, np.linalg.eigvalsh(A), atol=1e-10)
    assert np.allclose(A @ vecs, vecs * vals[:, None, :], atol=1e-9)


def test_jacobi_single_matrix():
    vals, vecs = rip.jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert vals == pytest.approx([1.0, 3.0])
    assert abs(vecs[0, 1]) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(InputError):
        rip.jacobi_eigh(np.zeros((2, 3)))


def test_sample_T_and_subsampling():
    spec = field_for_order(3)
    T = rip.sample_T(spec, 2, 5, seed=4)
    assert len(T) == 5
    assert (T.T == rip.sample_T(spec, 2, 5, seed=4).T).all()
    M = rip.phi_lin_sub(spec, 2, T)
    assert (M.rows, M.cols) == (10, 9)
    assert M.group_count == 5
    with pytest.raises(InputError):
        rip.phi_lin_sub(spec, 2, np.array([9]))
    with pytest.raises(InputError):
        rip.sample_T(spec, 2, 0, seed=1)


def test_subsample_rows():
    U = ComplexMatrix(np.eye(4))
    sub = rip.subsample_rows(U, [3, 1, 1])
    assert sub.entries.real.tolist()[0] == [0, 0, 0, 1]
    assert sub.groups.tolist() == [0, 1, 2]
    with pytest.raises(InputError):
        rip.subsample_rows(U, [4])


def test_matrix_text_format():
    M = ComplexMatrix(np.array([[1 + 2j, -0.5], [0.25j, 3]]))
    loaded = rip.load_matrix(rip.dump_matrix(M))
    assert np.array_equal(loaded.entries, M.entries)
    # numpy scalar reprs (np.float64(...)) must not leak into the file
    assert rip.dump_matrix(ComplexMatrix(np.array([[1 + 2j]]))) == "1 1\n1.0 2.0\n"
    with pytest.raises(InputError):
        rip.load_matrix("2 2\n1 0 0 0\n")
    with pytest.raises(InputError):
        rip.load_matrix("two rows")


def test_success_probability_range():
    spec = field_for_order(2)
    p = rip.rip_success_probability(spec, 3, 2, 16, 0.5, 5, seed=1, rip_mode="exact")
    assert 0 <= p <= 1
    assert p == rip.rip_success_probability(spec, 3, 2, 16, 0.5, 5, seed=1, rip_mode="exact")


def test_min_rows_for_rip():
    spec = field_for_order(2)
    search = rip.min_rows_for_rip(spec, 3, 2, 0.5, 5, seed=7, rip_mode="exact")
    probes = dict(search.probes)
    assert probes[search.rows] >= rip.SUCCESS_THRESHOLD
    if search.rows > 1:
        assert probes[search.rows - 1] < rip.SUCCESS_THRESHOLD
    again = rip.min_rows_for_rip(spec, 3, 2, 0.5, 5, seed=7, rip_mode="exact")
    assert again == search


def test_min_rows_for_rip_budget():
    spec = field_for_order(2)
    with pytest.raises(BudgetError):
        rip.min_rows_for_rip(spec, 2, 2, -1.0, 2, seed=1, rip_mode="exact")


def test_empirical_delta_expectation():
    spec = field_for_order(2)
    mean, std = rip.empirical_delta_expectation(spec, 3, 2, 32, 4, seed=2, rip_mode="exact")
    assert 0 <= mean <= 1
    assert std >= 0
    with pytest.raises(InputError):
        rip.empirical_delta_expectation(spec, 3, 2, 32, 0, seed=2)


def test_phi_lin_sub_matches_encoded_code():
    rng = np.random.default_rng(100)
    for trial in range(100):
        q = int(rng.choice([2, 3, 4]))
        ktilde = int(rng.integers(1, 4))
        n = int(rng.integers(1, 9))
        spec = field_for_order(q)
        gen = codes.random_generator(spec, ktilde, n, trial)
        expected = phi_code(codes.enumerate_codewords(gen))
        T = vectors_to_labels(spec, gen.entries.T)
        M = rip.phi_lin_sub(spec, ktilde, T)
        assert M.entries.shape == expected.entries.shape
        assert np.abs(M.entries - expected.entries).max() <= 1e-12


def test_sample_T_is_uniform():
    spec = field_for_order(2)
    T = rip.sample_T(spec, 4, 16000, seed=21)
    observed = np.bincount(T.T, minlength=16)
    expected = 16000 / 16
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    # 15 degrees of freedom
    assert chi2 < 45


@pytest.mark.parametrize("k", [2, 3])
def test_rip_constant_bounds_every_sparse_vector(k):
    spec = field_for_order(3)
    T = rip.sample_T(spec, 2, 6, seed=8)
    M = rip.phi_lin_sub(spec, 2, T)
    normalizer = math.sqrt((spec.q - 1) * len(T.T))
    delta = rip.rip_constant_exact(M, k, normalizer).delta
    for seed in range(200):
        x = random_sparse_unit(M.cols, k, seed).to_dense()
        energy = np.linalg.norm(M.entries @ x) ** 2 / normalizer**2
        assert abs(energy - 1) <= delta + 1e-9
