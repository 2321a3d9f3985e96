import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointrange.errors import DimensionMismatch, NoConvergence, NotHermitian
from jointrange.linalg import (commutator_norm, herm_eig, is_normal, is_unitary, jacobi_eigh,
                               random_hermitian, random_unitary)

from conftest import ex31_matrix

TAU = 1e-13


def _padded_ex31_hermitian():
    H = np.zeros((5, 5), dtype=complex)
    H[:3, :3] = np.diag([1, -0.5, -0.5])
    H[3:, 3:] = [[0, 0.05], [0.05, 0]]
    return H


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_padded_example_spectrum(method):
    H = _padded_ex31_hermitian()
    res = herm_eig(H, method=method)
    expected = np.array([1, 0.05, -0.05, -0.5, -0.5])
    np.testing.assert_allclose(res.values, expected, atol=1e-14)
    # each expected value is a root of the characteristic polynomial
    for lam in expected:
        assert abs(np.linalg.det(H - lam * np.eye(5))) < 1e-14


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_identity_and_diagonal(method):
    res = herm_eig(np.eye(4), method=method)
    np.testing.assert_array_equal(res.values, np.ones(4))
    assert is_unitary(res.vectors, 1e-12)
    res = herm_eig(np.diag([3.0, 1.0, 2.0]), method=method)
    np.testing.assert_allclose(res.values, [3, 2, 1], atol=1e-15)
    P = np.abs(res.vectors)
    np.testing.assert_allclose(P, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-15)


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig([[0, 1], [0, 0]])


def test_jacobi_sweep_limit():
    rng = np.random.default_rng(0)
    with pytest.raises(NoConvergence):
        jacobi_eigh(random_hermitian(6, rng), max_sweeps=1)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1), method=st.sampled_from(["lapack", "jacobi"]))
def test_eig_invariants(n, seed, method):
    A = random_hermitian(n, np.random.default_rng(seed))
    values, V = herm_eig(A, method=method)
    nrm = np.linalg.norm(A)
    assert np.all(np.diff(values) <= 0)
    assert np.linalg.norm(V.conj().T @ V - np.eye(n)) <= 10 * TAU * max(n, 1) * 10
    assert np.linalg.norm(A - (V * values) @ V.conj().T) <= 10 * TAU * nrm * 10
    assert abs(values.sum() - np.trace(A).real) <= 10 * TAU * nrm
    for j in range(n):
        assert np.linalg.norm(A @ V[:, j] - values[j] * V[:, j]) <= 10 * TAU * nrm * 10


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(n, seed):
    A = random_hermitian(n, np.random.default_rng(seed))
    np.testing.assert_allclose(jacobi_eigh(A).values, herm_eig(A).values, atol=1e-12 * (1 + np.linalg.norm(A)))


def test_commutator_norm():
    rng = np.random.default_rng(1)
    X = random_hermitian(4, rng)
    Y = random_hermitian(4, rng)
    assert commutator_norm(X, X) == 0.0
    assert commutator_norm(np.diag([1, 2.0]), np.diag([3, -1.0])) == 0.0
    assert commutator_norm(X, Y) == pytest.approx(commutator_norm(Y, X), rel=1e-14)
    with pytest.raises(DimensionMismatch):
        commutator_norm(np.eye(2), np.eye(3))


def test_commutator_of_triangle_example_parts():
    A = ex31_matrix()
    H1, H2 = (A + A.conj().T) / 2, (A - A.conj().T) / 2j
    # only the 2x2 nilpotent block contributes: [H1, H2] = diag(0.005i, -0.005i) there
    assert commutator_norm(H1, H2) == pytest.approx(0.005 * np.sqrt(2), rel=1e-12)


def test_is_normal():
    assert is_normal(random_unitary(5, 3))
    assert not is_normal(ex31_matrix())
    assert not is_normal(np.array([[0, 0.1], [0, 0]]))
    assert is_normal(np.diag([1 + 2j, -1j]))


def test_random_unitary():
    u = random_unitary(1, 5)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-15
    np.testing.assert_array_equal(random_unitary(6, 42), random_unitary(6, 42))
    assert not np.array_equal(random_unitary(6, 42), random_unitary(6, 43))
    for n in (2, 5, 8, 16):
        U = random_unitary(n, n)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-12
