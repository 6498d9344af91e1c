import numpy as np
import pytest

from listdec import codes, simplex
from listdec.errors import BudgetError, InputError
from listdec.gf import field_for_order


def test_phi_symbol_binary():
    assert np.allclose(simplex.phi_symbol(0, 2), [1])
    assert np.allclose(simplex.phi_symbol(1, 2), [-1])


def test_phi_symbol_ternary():
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(simplex.phi_symbol(1, 3), [w, w**2])
    assert np.allclose(simplex.phi_symbol(2, 3), [w**2, w])


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
def test_simplex_inner(q):
    for x in range(q):
        for y in range(q):
            assert simplex.simplex_inner(x, y, q) == (q - 1 if x == y else -1)


def test_simplex_identity_random_vectors():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        q = int(rng.choice([2, 3, 4, 5, 7, 8]))
        n = int(rng.integers(1, 33))
        x = rng.integers(0, q, size=n)
        y = rng.integers(0, q, size=n)
        inner = np.vdot(simplex.phi_vector(y, q), simplex.phi_vector(x, q))
        disagreements = np.count_nonzero(x != y)
        assert abs(inner - ((q - 1) * n - q * disagreements)) < 1e-9


def test_phi_vector_layout():
    v = simplex.phi_vector([0, 1], 3)
    assert v.shape == (4,)
    assert np.allclose(v[:2], [1, 1])
    assert np.allclose(v[2:], simplex.phi_symbol(1, 3))


def test_phi_matrix_groups():
    M = simplex.phi_matrix(np.array([[0, 1], [2, 0], [1, 1]]), 3)
    assert (M.rows, M.cols) == (6, 2)
    assert M.groups.tolist() == [0, 0, 1, 1, 2, 2]
    assert M.group_count == 3
    assert np.allclose(M.entries[:, 1], simplex.phi_vector([1, 0, 1], 3))


def test_phi_code_binary_repetition():
    from listdec.gf import field_make

    gen = codes.GeneratorMatrix(field_make(2), [[1, 1]])
    M = simplex.phi_code(codes.enumerate_codewords(gen))
    assert np.allclose(M.entries, [[1, -1], [1, -1]])


def test_phi_code_norms():
    f = field_for_order(4)
    code = codes.enumerate_codewords(codes.random_generator(f, 2, 5, 1))
    M = simplex.phi_code(code)
    assert (M.rows, M.cols) == (15, 16)
    assert np.allclose(np.linalg.norm(M.entries, axis=0) ** 2, 15)


def test_gram_of_code_matches_distances():
    f = field_for_order(3)
    code = codes.enumerate_codewords(codes.random_generator(f, 2, 6, 4))
    G = simplex.phi_code(code).gram()
    D = codes.pairwise_distance_counts(code.codewords)
    assert np.allclose(G, 2 * 6 - 3 * D)


def test_avg_dist_via_norm():
    words = [[0, 1, 2, 0], [0, 2, 2, 1], [1, 1, 0, 0]]
    exact = codes.avg_pairwise_distance(words)
    assert simplex.avg_dist_via_norm(words, 3) == pytest.approx(float(exact), abs=1e-12)


def test_roots_of_unity_are_read_only():
    roots = simplex.roots_of_unity(5)
    assert abs(roots[0] - 1) == 0
    with pytest.raises(ValueError):
        roots[1] = 0


def test_complex_matrix_validation():
    with pytest.raises(InputError):
        simplex.ComplexMatrix(np.array([1.0, np.nan]).reshape(1, 2))
    with pytest.raises(InputError):
        simplex.ComplexMatrix(np.ones(3))
    with pytest.raises(InputError):
        simplex.ComplexMatrix(np.ones((2, 2)), groups=[0])


def test_label_errors():
    with pytest.raises(InputError):
        simplex.phi_symbol(3, 3)
    with pytest.raises(InputError):
        simplex.phi_vector([0, 4], 4)
    with pytest.raises(InputError):
        simplex.phi_symbol(0, 1)
    with pytest.raises(InputError):
        simplex.avg_dist_via_norm([[0, 1]], 2)


def test_phi_matrix_budget(monkeypatch):
    monkeypatch.setattr(simplex, "MAX_ENTRIES", 10)
    with pytest.raises(BudgetError):
        simplex.phi_matrix(np.zeros((4, 4), dtype=int), 2)
