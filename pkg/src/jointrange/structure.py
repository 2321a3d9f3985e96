"""Common eigenvectors, conical points and projection pinching.

The central object is the decomposition ``U* A_j U = D_j (+) Q_j`` of a
Hermitian tuple, where the ``D_j`` are diagonal of a common size ``ell`` and
``ell`` is as large as possible.  The columns of ``U`` spanning the ``D``
block are exactly the common eigenvectors of the tuple.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .crange import (WeightSpec, cluster_points, range_scale, sample_directions,
                     support_many)
from .errors import BadBlockSpec, NotCommutingNormal, NotHermitian, NotProjection, SpectrumMismatch
from .family import MatrixTuple, hermitian_expand
from .linalg import TAU_HERM, fro, hermitian_defect, orth_complement

BLOCK_TOL = 1e-8
CONE_RADIUS = 1e-6
CONE_MIN_SV = 0.05
SNAP_TOL = 1e-9
PAIR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """``U* A_j U = D_j (+) Q_j`` with diagonal ``D_j`` of size ``ell``."""

    U: np.ndarray
    ell: int
    D: list
    Q: list

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def diagonal_tuple(self) -> MatrixTuple | None:
        if self.ell == 0:
            return None
        return MatrixTuple(tuple(self.D))

    def residual_tuple(self) -> MatrixTuple | None:
        if self.ell == self.n:
            return None
        return MatrixTuple(tuple(self.Q))

    def reconstruct(self, j: int) -> np.ndarray:
        n, ell = self.n, self.ell
        B = np.zeros((n, n), dtype=complex)
        B[:ell, :ell] = self.D[j]
        B[ell:, ell:] = self.Q[j]
        return self.U @ B @ self.U.conj().T


def _require_hermitian(A: MatrixTuple) -> list:
    for nm, a in zip(A.names, A.A):
        if hermitian_defect(a) > TAU_HERM:
            raise NotHermitian(f"{nm} is not Hermitian")
    return [(a + a.conj().T) / 2 for a in A.A]


def _split_clusters(w: np.ndarray, gap: float) -> list:
    """Index groups of a descending spectrum separated by gaps above ``gap``."""
    groups, cur = [], [0]
    for i in range(1, len(w)):
        if w[i - 1] - w[i] > gap:
            groups.append(cur)
            cur = []
        cur.append(i)
    groups.append(cur)
    return groups


def _leaves(Vs: np.ndarray, mats: list, gaps: list, start: int, out: list) -> None:
    for j in range(start, len(mats)):
        M = Vs.conj().T @ mats[j] @ Vs
        w, W = np.linalg.eigh((M + M.conj().T) / 2)
        w, W = w[::-1], W[:, ::-1]
        if w[0] - w[-1] <= gaps[j]:
            continue
        for grp in _split_clusters(w, gaps[j]):
            _leaves(Vs @ W[:, grp], mats, gaps, j + 1, out)
        return
    out.append(Vs)


def common_eigenvectors(mats: list, tol: float = BLOCK_TOL) -> np.ndarray:
    """Orthonormal basis of the span of all common eigenvectors.

    The space is split by eigenvalue clusters of each matrix compressed onto
    the current subspace, in order.  On each final subspace every compression
    is scalar ``mu_j``; its common eigenvectors are the joint null space of
    ``A_j - mu_j I``, which is then checked against the full matrices.
    """
    n = mats[0].shape[0]
    norms = [fro(a) for a in mats]
    gaps = [tol * nm for nm in norms]
    leaves: list = []
    _leaves(np.eye(n, dtype=complex), mats, gaps, 0, leaves)
    cols = []
    live = [j for j, nm in enumerate(norms) if nm > 0.0]
    for Vs in leaves:
        if not live:
            cols.append(Vs)
            continue
        blocks = []
        for j in live:
            a = mats[j]
            mu = np.trace(Vs.conj().T @ a @ Vs).real / Vs.shape[1]
            blocks.append((a - mu * np.eye(n)) @ Vs / norms[j])
        K = np.vstack(blocks)
        _, s, Wh = np.linalg.svd(K)
        s_full = np.zeros(Vs.shape[1])
        s_full[: len(s)] = s
        null = Wh.conj().T[:, s_full <= tol * math.sqrt(len(live))]
        if null.shape[1] == 0:
            continue
        N = Vs @ null
        good = []
        for i in range(N.shape[1]):
            u = N[:, i]
            ok = all(fro(a @ u - np.vdot(u, a @ u) * u) <= tol * nm for a, nm in zip(mats, norms))
            if ok:
                good.append(i)
        if good:
            cols.append(N[:, good])
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    E = np.hstack(cols)
    # leaves are mutually orthogonal; one QR keeps the basis orthonormal to rounding
    Qe, R = np.linalg.qr(E)
    return Qe * (np.diag(R) / np.abs(np.diag(R)))


def extract_blocks(A: MatrixTuple, tol: float = BLOCK_TOL) -> BlockDecomposition:
    """Maximal common-diagonal block of a Hermitian tuple.

    Returns ``U`` whose first ``ell`` columns are common eigenvectors of every
    ``A_j`` and whose remaining columns span the residual block, which holds no
    further common eigenvector.  ``ell = 0`` is a valid outcome.
    """
    mats = _require_hermitian(A)
    n = A.n
    E = common_eigenvectors(mats, tol)
    ell = E.shape[1]
    U = np.hstack([E, orth_complement(E, n)])
    D, Q = [], []
    for a in mats:
        B = U.conj().T @ a @ U
        D.append(np.diag(np.real(np.diag(B[:ell, :ell]))))
        Q.append((B[ell:, ell:] + B[ell:, ell:].conj().T) / 2)
    return BlockDecomposition(U, ell, D, Q)


def simultaneous_diagonalize(F, tol: float = PAIR_TOL) -> np.ndarray:
    """Unitary ``U`` with every ``U* A_j U`` diagonal, for a commuting normal family.

    Raises
    ------
    NotCommutingNormal
        With the offending Hermitian-part pair and its relative commutator
        residual, or with ``pair=None`` when no full common eigenbasis exists.
    """
    T = F if isinstance(F, MatrixTuple) else MatrixTuple(tuple(F))
    parts = [h for h in hermitian_expand(T) if fro(h) > 0.0]
    n = T.n
    if not parts:
        return np.eye(n, dtype=complex)
    for r in range(len(parts)):
        for s in range(r + 1, len(parts)):
            X, Y = parts[r], parts[s]
            res = fro(X @ Y - Y @ X) / (fro(X) * fro(Y))
            if res > tol:
                raise NotCommutingNormal(
                    f"Hermitian parts {r} and {s} do not commute (relative residual {res:.3e})",
                    pair=(r, s), residual=res)
    E = common_eigenvectors(parts, tol)
    if E.shape[1] < n:
        raise NotCommutingNormal(f"only {E.shape[1]} of {n} common eigenvectors found")
    for a in T.A:
        B = E.conj().T @ a @ E
        off = fro(B - np.diag(np.diag(B)))
        if off > tol * max(fro(a), 1e-300) * 10:
            raise NotCommutingNormal(f"off-diagonal residual {off:.3e} after diagonalization",
                                     residual=off / fro(a))
    return E


@dataclass(frozen=True, eq=False)
class ConicalCertificate:
    """A sampled conical point together with the normals that expose it.

    ``unitary`` is the eigenvector unitary of the probe whose maximizer is
    reported as ``point``; it attains the point exactly.
    """

    point: np.ndarray
    directions: np.ndarray
    cone_rank: int
    singular_values: np.ndarray
    unitary: np.ndarray = field(repr=False)


def find_conical(A: MatrixTuple, C: WeightSpec, n_dirs: int = 2000, seed: int = 0,
                 radius: float = CONE_RADIUS, min_sv: float = CONE_MIN_SV) -> list:
    """Detect conical points of ``W_C(A)`` from a direction sweep.

    Maximizers are clustered (single linkage, ``radius`` times the range
    scale).  A cluster is accepted when the unit normals that produced it
    span ``R^m`` robustly: the singular values of the normal matrix, divided
    by the square root of the cluster size, must all be at least ``min_sv``.
    Vertices whose normal cone falls between samples can be missed; every
    reported point is an attained range point.
    """
    m = A.m
    dirs = sample_directions(m, n_dirs, seed)
    batch = support_many(A, C, dirs)
    scale = range_scale(A, C)
    labels = cluster_points(batch.points, radius * scale)
    certs = []
    for lab in range(labels.max() + 1 if len(labels) else 0):
        idx = np.flatnonzero(labels == lab)
        Dm = batch.V[idx]
        s = np.linalg.svd(Dm / math.sqrt(len(idx)), compute_uv=False)
        s_full = np.zeros(m)
        s_full[: len(s)] = s
        rank = int(np.sum(s_full >= min_sv))
        if rank < m:
            continue
        mins = batch.gaps[idx].min(axis=1) if batch.gaps.shape[1] else np.zeros(len(idx))
        best = idx[int(np.argmax(mins))]
        certs.append(ConicalCertificate(batch.points[best].copy(), Dm, rank, s_full,
                                        batch.eigvecs[best].copy()))
    return certs


@dataclass(frozen=True, eq=False)
class BlockReport:
    ok: bool
    block_sizes: list
    off_block: list

    def __bool__(self):
        return self.ok


def _off_block_mass(B: np.ndarray, sizes: Sequence) -> float:
    mask = np.ones(B.shape, dtype=bool)
    start = 0
    for sz in sizes:
        mask[start:start + sz, start:start + sz] = False
        start += sz
    return fro(B[mask])


def verify_conical_blocks(A: MatrixTuple, C: WeightSpec, U, tol: float = BLOCK_TOL) -> BlockReport:
    """Check that every ``U* A_j U`` splits along the eigenvalue blocks of ``C``.

    ``off_block`` lists, per member, the Frobenius mass outside the diagonal
    blocks relative to ``||A_j||_F``.
    """
    sizes = C.block_sizes
    if sum(sizes) != A.n or C.n != A.n:
        raise BadBlockSpec(f"weight blocks {sizes} do not partition n = {A.n}")
    U = np.asarray(U)
    rel = []
    for a in A.A:
        nm = fro(a)
        rel.append(_off_block_mass(U.conj().T @ a @ U, sizes) / nm if nm > 0 else 0.0)
    return BlockReport(all(r <= tol for r in rel), list(sizes), rel)


@dataclass(frozen=True, eq=False)
class PinchDecomposition:
    """``P_11 (+) P_22 = sum_l weights[l] * projections[l]``."""

    weights: np.ndarray
    projections: list
    source: np.ndarray
    k: int
    blocks: tuple

    def reconstruct(self) -> np.ndarray:
        return sum(w * Q for w, Q in zip(self.weights, self.projections))


def _grid(x: np.ndarray) -> np.ndarray:
    # multiples of 2**-52 in [0, 1] subtract exactly, so telescoping sums stay exact
    return np.round(x * 2.0 ** 52) / 2.0 ** 52


def _pinch_pair(P: np.ndarray, n1: int, k: int, tol: float):
    n = P.shape[0]
    n2 = n - n1
    P11, P22 = P[:n1, :n1], P[n1:, n1:]
    d, V1 = np.linalg.eigh(P11) if n1 else (np.zeros(0), np.zeros((0, 0)))
    d, V1 = d[::-1], V1[:, ::-1]
    e, V2 = np.linalg.eigh(P22) if n2 else (np.zeros(0), np.zeros((0, 0)))
    e, V2 = e[::-1], V2[:, ::-1]
    d = np.where(np.abs(d) <= tol, 0.0, np.where(np.abs(d - 1) <= tol, 1.0, d))
    d = _grid(np.clip(d, 0.0, 1.0))

    def dd(i):  # 1-based with d_i = 1 for i <= 0 and d_i = 0 for i > n1
        if i <= 0:
            return 1.0
        if i > n1:
            return 0.0
        return d[i - 1]

    expected = np.array([1.0 - dd(k + 1 - t) for t in range(1, n2 + 1)])
    if n2 and np.max(np.abs(e - expected)) > 1e-8:
        raise SpectrumMismatch(
            f"P_22 spectrum does not pair with P_11 (max deviation {np.max(np.abs(e - expected)):.3e})")
    p, q = max(0, k - n2), min(k, n1)
    if dd(p) != 1.0 or dd(q + 1) != 0.0:
        raise SpectrumMismatch("boundary eigenvalues of P_11 are not 0/1")
    V = np.zeros((n, n), dtype=complex)
    V[:n1, :n1] = V1
    V[n1:, n1:] = V2
    weights, projs, ranks = [], [], []
    for ell in range(p, q + 1):
        t = np.zeros(n)
        t[:ell] = 1.0
        t[n1:n1 + k - ell] = 1.0
        weights.append(dd(ell) - dd(ell + 1))
        Q = (V * t) @ V.conj().T
        projs.append((Q + Q.conj().T) / 2)
        ranks.append(ell)
    return weights, projs, ranks


def pinch_decompose(P, split: Sequence, tol: float = SNAP_TOL) -> PinchDecomposition:
    """Write the block-diagonal pinching of a projection as a convex combination.

    Parameters
    ----------
    P : array_like, shape (n, n)
        Hermitian idempotent of rank ``k = round(tr P)``.
    split : sequence of int
        Block sizes ``(n_1, ..., n_r)`` summing to ``n``.  For ``r > 2`` the
        first ``r - 1`` blocks are pinched off the last one, and the leading
        part of each term is decomposed recursively.

    Returns
    -------
    PinchDecomposition
        One term per admissible ``ell`` (the rank carried by the leading block),
        including zero-weight terms; each projection is block diagonal of rank
        ``k``.
    """
    P = np.asarray(P, dtype=complex)
    n = P.shape[0]
    sizes = tuple(int(s) for s in split)
    if P.ndim != 2 or P.shape[1] != n:
        raise NotProjection("P must be square")
    if any(s < 0 for s in sizes) or sum(sizes) != n:
        raise BadBlockSpec(f"split {sizes} does not partition n = {n}")
    if fro(P - P.conj().T) > tol * max(1.0, fro(P)) or fro(P @ P - P) > tol * max(1.0, fro(P)):
        raise NotProjection("P is not a Hermitian idempotent")
    P = (P + P.conj().T) / 2
    k = int(round(np.trace(P).real))
    source = np.zeros_like(P)
    start = 0
    for s in sizes:
        source[start:start + s, start:start + s] = P[start:start + s, start:start + s]
        start += s
    if len(sizes) <= 1:
        return PinchDecomposition(np.array([1.0]), [P], source, k, sizes)
    lead = sum(sizes[:-1])
    weights, projs, ranks = _pinch_pair(P, lead, k, tol)
    if len(sizes) > 2:
        out_w, out_p = [], []
        for w, Q, ell in zip(weights, projs, ranks):
            sub = pinch_decompose(Q[:lead, :lead], sizes[:-1], tol)
            for w2, Q2 in zip(sub.weights, sub.projections):
                R = np.zeros_like(P)
                R[:lead, :lead] = Q2
                R[lead:, lead:] = Q[lead:, lead:]
                out_w.append(w * w2)
                out_p.append(R)
        # products leave the grid; snap back and put the rounding into the largest term
        weights = _grid(np.array(out_w))
        weights[np.argmax(weights)] += 1.0 - weights.sum()
        projs = out_p
    return PinchDecomposition(np.array(weights, dtype=float), projs, source, k, sizes)


def _topk_sums(w: np.ndarray) -> np.ndarray:
    """``[0, w_1, w_1 + w_2, ...]`` for a descending spectrum."""
    return np.concatenate([[0.0], np.cumsum(w)])


def partition_support_check(A: MatrixTuple, k: int, dirs, blocks: Sequence,
                            tol: float = 1e-9) -> bool:
    """Compare the k-range support with the best split of ``k`` across blocks.

    For a block-diagonal Hermitian tuple, the sum of the ``k`` largest
    eigenvalues of ``v . A`` must equal the maximum over ``k_1 + ... + k_r = k``
    of the blockwise top-``k_i`` sums, for every sampled ``v``.
    """
    mats = _require_hermitian(A)
    sizes = [int(b) for b in blocks]
    n = A.n
    if sum(sizes) != n or any(b <= 0 for b in sizes):
        raise BadBlockSpec(f"blocks {sizes} do not partition n = {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    for a in mats:
        if _off_block_mass(a, sizes) > BLOCK_TOL * max(fro(a), 1e-300):
            raise BadBlockSpec("tuple is not block diagonal with the declared sizes")
    V = np.atleast_2d(np.asarray(dirs, dtype=float))
    S = np.stack(mats)
    scale = max(fro(a) for a in mats) * k or 1.0
    bounds = np.cumsum([0] + sizes)
    for v in V:
        M = np.einsum("j,jab->ab", v, S)
        full = _topk_sums(np.linalg.eigvalsh(M)[::-1])[k]
        best = np.array([0.0] + [-np.inf] * k)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            sums = _topk_sums(np.linalg.eigvalsh(M[lo:hi, lo:hi])[::-1])
            nxt = np.full(k + 1, -np.inf)
            for used in range(k + 1):
                if best[used] == -np.inf:
                    continue
                for ki in range(min(hi - lo, k - used) + 1):
                    nxt[used + ki] = max(nxt[used + ki], best[used] + sums[ki])
            best = nxt
        if abs(full - best[k]) > tol * scale:
            return False
    return True
