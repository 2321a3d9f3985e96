import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointrange.crange import boundary2d, k_range, make_weight
from jointrange.decide import (COMMUTING, INCONCLUSIVE, NOT_COMMUTING, NOT_POLYHEDRAL, POLYHEDRAL,
                               SEGMENT, SINGLETON, classify, decide_commuting, decide_polyhedral,
                               decide_via_conical, hat_weight)
from jointrange.errors import BadWeight
from jointrange.family import MatrixTuple
from jointrange.linalg import jacobi_eigh, random_unitary
from jointrange.problem import random_commuting_family

from conftest import ex31_matrix, ex32_matrix, random_diagonal_tuple


def test_diagonal_tuple_polyhedral():
    rng = np.random.default_rng(0)
    D = random_diagonal_tuple(rng, 6, 3)
    for C in (k_range(1, 6), k_range(3, 6), make_weight(rng.standard_normal(6), 6)):
        rep = decide_polyhedral(D, C)
        assert rep.verdict == POLYHEDRAL
        assert rep.params["ell"] == 6
        assert "U" in rep.certificate


def test_triangle_not_polyhedral_at_k2(ex31):
    rep = decide_polyhedral(ex31, k_range(2, 5))
    assert rep.verdict == NOT_POLYHEDRAL
    assert rep.route == "structural"
    assert (rep.certificate["ell"], rep.certificate["two_k"]) == (3, 4)


def test_triangle_polyhedral_at_k1(ex31):
    # W(A) is the triangle: ell = 3 >= 2 and the skew block sits inside it
    rep = decide_polyhedral(ex31, k_range(1, 5))
    assert rep.verdict == POLYHEDRAL
    assert rep.certificate["max_sampled_gap"] <= 1e-8


def test_three_matrix_support_gap(ex52):
    rep = decide_polyhedral(ex52, k_range(1, 6))
    assert rep.verdict == NOT_POLYHEDRAL
    assert rep.route == "geometric"
    assert rep.params["ell"] == 2
    v = rep.certificate["direction"]
    assert rep.certificate["gap"] > 0.1
    # re-derive the reported gap with the Jacobi solver and the two diagonal points
    M = sum(vj * a for vj, a in zip(v, ex52.A))
    hA = jacobi_eigh(M).values[0]
    hD = max(v @ np.array([1, 1, 1]), v @ np.array([-1, -1, 1]))
    assert hA - hD == pytest.approx(rep.certificate["gap"], abs=1e-10)


def test_three_matrix_gap_at_named_direction(ex52):
    v = np.array([1, 1, -1]) / np.sqrt(3)
    M = sum(vj * a for vj, a in zip(v, ex52.A))
    hA = jacobi_eigh(M).values[0]
    hD = 1 / np.sqrt(3)
    # frozen from the Jacobi oracle: lambda_max((A1 + A2 - A3)/sqrt 3) = (1 + sqrt 2)/sqrt 3
    assert hA == pytest.approx((1 + np.sqrt(2)) / np.sqrt(3), abs=1e-12)
    assert hA - hD > 0.8


def test_three_matrix_pairs_polyhedral_but_triple_not(ex52):
    C = k_range(1, 6)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        pair = MatrixTuple((ex52.A[i], ex52.A[j]))
        b = boundary2d(pair, None, C, 720)
        got = sorted(map(tuple, np.round(b.vertices, 9)))
        assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert decide_polyhedral(ex52, C).verdict == NOT_POLYHEDRAL


def test_hat_weight():
    C = make_weight([5, 3, 3, 3, 1, 0], 6)
    assert C.gamma == 2
    np.testing.assert_array_equal(hat_weight(C, 4), [2, 0, -2, -3])
    np.testing.assert_array_equal(hat_weight(C, 6), [2, 0, 0, 0, -2, -3])


def test_hat_check_on_block_tuple():
    rng = np.random.default_rng(5)
    D = np.diag([3.0, -2, 1, 0.5])
    Z = rng.standard_normal((2, 2))
    X = np.zeros((6, 6))
    X[:4, :4] = D
    X[4:, 4:] = 0.1 * (Z + Z.T)
    Y = np.zeros((6, 6))
    Y[:4, :4] = np.diag([0.0, 1, -1, 2])
    T = MatrixTuple.of(X, Y)
    rep = decide_polyhedral(T, k_range(1, 6))
    assert rep.verdict == POLYHEDRAL
    assert rep.certificate["hat_c_max_deviation"] <= 1e-10


def test_polyhedral_errors(ex31):
    with pytest.raises(BadWeight):
        decide_polyhedral(ex31, k_range(1, 4))


def test_commuting_family_both_routes():
    F = random_commuting_family(5, 3, 7)
    rep = decide_commuting(F)
    assert rep.verdict == COMMUTING
    U = rep.certificate["U"]
    for a in F:
        B = U.conj().T @ a @ U
        assert np.linalg.norm(B - np.diag(np.diag(B))) <= 1e-8 * np.linalg.norm(a)


@pytest.mark.parametrize("mode", ["algebraic", "geometric", "both"])
def test_triangle_not_commuting(mode):
    assert decide_commuting([ex31_matrix()], mode).verdict == NOT_COMMUTING


@pytest.mark.parametrize("mode", ["algebraic", "geometric", "both"])
def test_square_not_commuting(mode):
    rep = decide_commuting([ex32_matrix()], mode)
    assert rep.verdict == NOT_COMMUTING
    assert rep.params["k"] == 3


def test_square_k1_insufficient(ex32):
    # at k = 1 the square range is polyhedral although the parts do not commute
    assert decide_polyhedral(ex32, k_range(1, 6)).verdict == POLYHEDRAL
    assert decide_polyhedral(ex32, k_range(3, 6)).verdict == NOT_POLYHEDRAL


def test_commuting_k_validation():
    F = random_commuting_family(6, 2, 1)
    assert decide_commuting(F, k=2).verdict == COMMUTING
    with pytest.raises(BadWeight):
        decide_commuting(F, k=1)
    with pytest.raises(ValueError):
        decide_commuting(F, mode="other")


def test_commuting_scalar_and_one_dimensional():
    assert decide_commuting([np.eye(3), 2 * np.eye(3)]).verdict == COMMUTING
    assert decide_commuting([np.array([[2 + 1j]])]).verdict == COMMUTING


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), eps=st.sampled_from([0.0, 1e-2]))
def test_routes_agree(seed, n, eps):
    F = random_commuting_family(n, 3, seed)
    if eps:
        rng = np.random.default_rng(seed)
        F = [a + eps * np.linalg.norm(a) * rng.standard_normal((n, n)) / n for a in F]
    alg = decide_commuting(F, "algebraic").verdict
    geo = decide_commuting(F, "geometric").verdict
    assert alg == geo == (NOT_COMMUTING if eps else COMMUTING)


def test_conical_route():
    rng = np.random.default_rng(1)
    D = random_diagonal_tuple(rng, 4, 2)
    C = make_weight([4, 3, 2, 1], 4)
    rep = decide_via_conical(D, C)
    assert rep.verdict == COMMUTING
    assert len(rep.certificate["points"]) >= 1
    with pytest.raises(BadWeight):
        decide_via_conical(D, k_range(1, 4))


def test_conical_route_triangle_never_commuting(ex31):
    rep = decide_via_conical(ex31, make_weight([5, 4, 3, 2, 1], 5))
    assert rep.verdict in (INCONCLUSIVE, NOT_COMMUTING)


def test_conical_route_three_matrix_distinct_weight(ex52):
    C = make_weight([1, .5, .4, .3, .2, .1], 6)
    rep = decide_via_conical(ex52, C)
    assert rep.verdict != COMMUTING


def test_classify():
    assert classify(MatrixTuple.of(np.eye(3)), k_range(1, 3)).verdict == SINGLETON
    H = np.diag([1.0, 0, 2])
    assert classify(MatrixTuple.of(H, 3 * H), k_range(1, 3)).verdict == SEGMENT
    assert classify(MatrixTuple.of(ex31_matrix()), k_range(1, 5)).verdict == INCONCLUSIVE


def test_report_json_roundtrip():
    import json
    rep = decide_polyhedral(MatrixTuple.of(np.diag([1.0, 2]), np.diag([0.0, 1])), k_range(1, 2))
    doc = json.loads(json.dumps(rep.to_dict()))
    assert doc["verdict"] == POLYHEDRAL
    U = np.array(doc["certificate"]["U"]["real"]) + 1j * np.array(doc["certificate"]["U"]["imag"])
    assert np.allclose(U.conj().T @ U, np.eye(2))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_monotone_in_gamma(seed):
    """Polyhedral at gamma = k implies polyhedral for every weight with smaller gamma."""
    rng = np.random.default_rng(seed)
    n = 6
    T = random_diagonal_tuple(rng, 4, 2)
    X = np.zeros((n, n), dtype=complex)
    Y = np.zeros((n, n), dtype=complex)
    X[:4, :4], Y[:4, :4] = T.A
    Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    X[4:, 4:] = 0.05 * (Z + Z.conj().T)
    V = random_unitary(n, seed)
    S = MatrixTuple.of(V @ X @ V.conj().T, V @ Y @ V.conj().T)
    top = None
    for k in (2, 1):
        if decide_polyhedral(S, k_range(k, n)).verdict == POLYHEDRAL:
            top = k
            break
    if top is None:
        return
    for _ in range(5):
        c = np.sort(rng.standard_normal(n))[::-1]
        c[top:n - top] = c[top]
        C = make_weight(c, n)
        assert C.gamma <= top
        assert decide_polyhedral(S, C).verdict == POLYHEDRAL
