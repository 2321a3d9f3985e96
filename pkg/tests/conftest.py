import cmath
import math

import numpy as np
import pytest

from jointrange.family import MatrixTuple


def ex31_matrix():
    w = cmath.exp(2j * math.pi / 3)
    A = np.zeros((5, 5), dtype=complex)
    A[0, 0], A[1, 1], A[2, 2] = 1, w, w ** 2
    A[3, 4] = 0.1
    return A


def ex32_matrix():
    A = np.zeros((6, 6), dtype=complex)
    A[:4, :4] = np.diag([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
    A[4:, 4:] = [[1, 1], [-1, -1]]
    return A


def ex52_matrices():
    A1 = np.diag([1, 1, -1, -1, 1, -1]).astype(complex)
    A2 = np.zeros((6, 6), dtype=complex)
    A2[:4, :4] = np.diag([1, -1, 1, -1])
    A2[4:, 4:] = [[0, 1j], [-1j, 0]]
    A3 = np.zeros((6, 6), dtype=complex)
    A3[0, 0] = 1
    A3[1:3, 1:3] = [[0, 1j], [-1j, 0]]
    A3[3:, 3:] = np.diag([1, -1, -1])
    return A1, A2, A3


@pytest.fixture
def ex31():
    """Hermitian expansion (H_1, H_2) of the 5x5 triangle example."""
    return MatrixTuple.of(ex31_matrix()).as_real()


@pytest.fixture
def ex32():
    return MatrixTuple.of(ex32_matrix()).as_real()


@pytest.fixture
def ex52():
    return MatrixTuple.of(*ex52_matrices())


def random_hermitian_tuple(rng, n, m):
    mats = []
    for _ in range(m):
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mats.append((Z + Z.conj().T) / 2)
    return MatrixTuple(tuple(mats))


def random_diagonal_tuple(rng, n, m):
    return MatrixTuple(tuple(np.diag(rng.standard_normal(n)) for _ in range(m)))


def random_block_tuple(rng, sizes, m):
    n = sum(sizes)
    mats = []
    for _ in range(m):
        B = np.zeros((n, n), dtype=complex)
        start = 0
        for s in sizes:
            Z = rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s))
            B[start:start + s, start:start + s] = (Z + Z.conj().T) / 2
            start += s
        mats.append(B)
    return MatrixTuple(tuple(mats))


def random_projection(rng, n, k):
    Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    Q, _ = np.linalg.qr(Z)
    return Q @ Q.conj().T


def random_unit(rng, m):
    v = rng.standard_normal(m)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
