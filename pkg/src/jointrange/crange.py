"""Weight vectors and support-function geometry of joint C-numerical ranges.

For Hermitian ``A_1, ..., A_m`` and ``C = diag(c)`` with ``c`` descending, the
convex hull of ``W_C(A)`` is the intersection of the halfspaces

    { a : <v, a> <= sum_j c_j * lambda_j(v_1 A_1 + ... + v_m A_m) }

over unit ``v``, with eigenvalues in descending order.  The maximizing point
in direction ``v`` is read off the eigenvector unitary of ``v . A``.

Every geometric claim made in this package is about that convex hull; for
``m > 1`` the range itself need not be convex.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.stats import norm, qmc

from .errors import BadWeight, DimensionMismatch, NotHermitian, NotUnitary, ScalarWeight, TooLarge
from .family import MatrixTuple
from .linalg import TAU_HERM, fro, hermitian_defect, herm_eig_stack, is_unitary

GAP_TOL = 1e-10
SUPPORT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """A real weight ``c`` sorted in descending order.

    ``k`` is set when the weight is the k-range pattern ``(1,...,1,0,...,0)``.
    """

    c: np.ndarray
    k: int | None = None

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def kind(self) -> str:
        return f"k-range({self.k})" if self.k is not None else "general-c"

    @property
    def C(self) -> np.ndarray:
        return np.diag(self.c)

    @property
    def breakpoints(self) -> list:
        """1-based indices ``j`` with ``c_j > c_(j+1)``."""
        return [j + 1 for j in range(self.n - 1) if self.c[j] > self.c[j + 1]]

    @property
    def distinct(self) -> list:
        """``[(xi_1, n_1), ..., (xi_r, n_r)]`` with ``xi_1 > ... > xi_r``."""
        out = []
        for x in self.c:
            if out and out[-1][0] == x:
                out[-1][1] += 1
            else:
                out.append([float(x), 1])
        return [tuple(p) for p in out]

    @property
    def block_sizes(self) -> list:
        return [nb for _, nb in self.distinct]

    @property
    def gamma(self) -> int:
        n = self.n
        cand = [j for j in self.breakpoints if j <= n / 2]
        cand += [n - j for j in self.breakpoints if n - j <= n / 2]
        return max(cand) if cand else 0

    @property
    def is_scalar(self) -> bool:
        return self.c[0] == self.c[-1]

    def to_dict(self) -> dict:
        if self.k is not None:
            return {"k": self.k}
        return {"c": [float(x) for x in self.c]}


def make_weight(spec, n: int, allow_scalar: bool = False) -> WeightSpec:
    """Build a :class:`WeightSpec` from ``k``, a weight vector, or a dict.

    Parameters
    ----------
    spec : int, sequence of float, or dict
        An integer ``k`` selects the k-range weight; a sequence is sorted into
        descending order; ``{"k": k}`` and ``{"c": [...]}`` are accepted too.
    n : int
        Matrix dimension.
    allow_scalar : bool
        Constant weights give a one-point range and are rejected unless this
        is set.
    """
    if isinstance(spec, dict):
        if "k" in spec:
            spec = int(spec["k"])
        elif "c" in spec:
            spec = spec["c"]
        else:
            raise BadWeight("weight dict needs a 'k' or a 'c' entry")
    if isinstance(spec, (int, np.integer)) and not isinstance(spec, bool):
        k = int(spec)
        hi = n if allow_scalar else n - 1
        if not 1 <= k <= hi:
            if k == n:
                raise ScalarWeight(f"k = n = {n} gives a constant weight")
            raise BadWeight(f"k must lie in [1, {n - 1}], got {k}")
        c = np.zeros(n)
        c[:k] = 1.0
        return WeightSpec(c, k)
    c = np.asarray(spec, dtype=float)
    if np.iscomplexobj(spec) or c.ndim != 1:
        raise BadWeight("weights must be a real vector")
    if len(c) != n:
        raise BadWeight(f"weight has length {len(c)}, expected {n}")
    if not np.all(np.isfinite(c)):
        raise BadWeight("weights must be finite")
    c = np.sort(c)[::-1].copy()
    if c[0] == c[-1] and not allow_scalar:
        raise ScalarWeight("all weight entries are equal; the range is a single point")
    kk = int(np.sum(c == 1.0))
    is_k = 0 < kk < n and np.all((c == 1.0) | (c == 0.0))
    return WeightSpec(c, kk if is_k else None)


def k_range(k: int, n: int) -> WeightSpec:
    return make_weight(int(k), n)


def range_scale(A: MatrixTuple, C: WeightSpec) -> float:
    """``max_j ||A_j||_F * ||c||_1``; all range tolerances are relative to it."""
    s = max(fro(a) for a in A.A) * float(np.sum(np.abs(C.c)))
    return s if s > 0.0 else 1.0


def _hermitian_stack(A: MatrixTuple) -> np.ndarray:
    for nm, a in zip(A.names, A.A):
        if hermitian_defect(a) > TAU_HERM:
            raise NotHermitian(f"{nm} is not Hermitian; use the Hermitian expansion first")
    S = A.stack()
    return (S + S.conj().transpose(0, 2, 1)) / 2


@dataclass(frozen=True, eq=False)
class SupportProbe:
    """Support value and maximizer of ``conv W_C(A)`` in direction ``v``.

    ``gaps`` holds ``lambda_j - lambda_(j+1)`` at every breakpoint of ``c``;
    when one vanishes the maximizer is not unique and ``unique`` is False.
    """

    v: np.ndarray
    h: float
    point: np.ndarray
    gaps: np.ndarray
    unique: bool
    unitary: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True, eq=False)
class ProbeBatch:
    """Vectorized probes: row ``i`` belongs to direction ``V[i]``."""

    V: np.ndarray
    h: np.ndarray
    points: np.ndarray
    gaps: np.ndarray
    unique: np.ndarray
    eigvecs: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.h)

    def probe(self, i: int) -> SupportProbe:
        return SupportProbe(self.V[i], float(self.h[i]), self.points[i], self.gaps[i],
                            bool(self.unique[i]), self.eigvecs[i])


def support_many(A: MatrixTuple, C: WeightSpec, V) -> ProbeBatch:
    """Evaluate :func:`support` for every row of ``V`` in one batched solve."""
    S = _hermitian_stack(A)
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if V.shape[1] != A.m:
        raise DimensionMismatch(f"directions must have {A.m} coordinates, got {V.shape[1]}")
    if C.n != A.n:
        raise DimensionMismatch(f"weight has length {C.n}, matrices are {A.n} x {A.n}")
    M = np.einsum("Nj,jab->Nab", V, S)
    w, U = herm_eig_stack(M)
    h = w @ C.c
    # diag(U* A_j U) for every direction and member
    diag = np.einsum("Nau,jab,Nbu->Nju", U.conj(), S, U, optimize=True).real
    points = diag @ C.c
    bp = np.array(C.breakpoints, dtype=int) - 1
    gaps = w[:, bp] - w[:, bp + 1] if len(bp) else np.zeros((len(V), 0))
    gap_tol = GAP_TOL * max(max(fro(a) for a in A.A), 1e-300)
    unique = np.all(gaps > gap_tol, axis=1)
    return ProbeBatch(V, h, points, gaps, unique, U)


def support(A: MatrixTuple, C: WeightSpec, v) -> SupportProbe:
    """Support value ``sum_j c_j lambda_j(v . A)`` and a maximizing range point."""
    v = np.asarray(v, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"direction must be a unit vector, |v| = {np.linalg.norm(v)!r}")
    return support_many(A, C, v[None, :]).probe(0)


def support_values(A: MatrixTuple, c: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Support values only, for any descending weight ``c`` (scalar allowed)."""
    S = A.stack()
    M = np.einsum("Nj,jab->Nab", np.atleast_2d(V), S)
    w = np.linalg.eigvalsh(M)[:, ::-1]
    return w @ np.asarray(c, dtype=float)


def point_at(A: MatrixTuple, C: WeightSpec, U, tol: float = 1e-9) -> np.ndarray:
    """The range point ``(tr C U* A_j U)_j``.

    Coordinates are complex for non-Hermitian tuples; their real and imaginary
    parts are the coordinates of the Hermitian expansion.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (A.n, A.n) or not is_unitary(U, tol * max(1, A.n)):
        raise NotUnitary("U is not unitary within tolerance")
    diag = np.einsum("au,jab,bu->ju", U.conj(), A.stack(), U)
    pts = diag @ C.c
    if A.is_hermitian:
        return pts.real
    return pts


@dataclass(frozen=True)
class Halfspace:
    """``{a : <v, a> <= h}``."""

    v: np.ndarray
    h: float

    def slack(self, points) -> np.ndarray:
        return self.h - np.asarray(points) @ self.v


def sample_directions(m: int, n_dirs: int, seed: int = 0) -> np.ndarray:
    """Unit directions in ``R^m`` used for support sweeps.

    ``m = 1``: both signs.  ``m = 2``: angles ``2 pi i / n_dirs``.  ``m >= 3``:
    scrambled Halton points pushed onto the sphere, plus the ``2m`` signed axes
    and (for ``m <= 12``) all normalized sign vectors.
    """
    if m < 1 or n_dirs < 1:
        raise ValueError("need m >= 1 and n_dirs >= 1")
    if m == 1:
        return np.array([[1.0], [-1.0]])
    if m == 2:
        th = 2 * np.pi * np.arange(n_dirs) / n_dirs
        return np.column_stack([np.cos(th), np.sin(th)])
    u = qmc.Halton(d=m, scramble=True, seed=seed).random(n_dirs)
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    dirs = [g / np.linalg.norm(g, axis=1, keepdims=True)]
    eye = np.eye(m)
    dirs += [eye, -eye]
    if m <= 12:
        signs = np.array(list(itertools.product([1.0, -1.0], repeat=m)))
        dirs.append(signs / math.sqrt(m))
    return np.vstack(dirs)


def cluster_points(points: np.ndarray, radius: float) -> np.ndarray:
    """Single-linkage cluster labels for points closer than ``radius``."""
    P = np.asarray(points, dtype=float)
    if len(P) == 0:
        return np.zeros(0, dtype=int)
    if P.ndim == 1:
        P = P[:, None]
    pairs = cKDTree(P).query_pairs(radius, output_type="ndarray")
    N = len(P)
    G = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(N, N))
    _, labels = connected_components(G, directed=False)
    # relabel in order of first appearance so output is deterministic
    _, first = np.unique(labels, return_index=True)
    remap = np.empty(labels.max() + 1, dtype=int)
    remap[labels[np.sort(first)]] = np.arange(len(first))
    return remap[labels]


def dedupe(points: np.ndarray, radius: float) -> np.ndarray:
    """One representative (first occurrence) per cluster, in input order."""
    P = np.asarray(points, dtype=float)
    if len(P) == 0:
        return P
    labels = cluster_points(P, radius)
    _, first = np.unique(labels, return_index=True)
    return P[np.sort(first)]


def planar_hull(points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Counter-clockwise hull vertices of planar points (monotone chain).

    Turns whose cross product is at most ``tol`` are treated as collinear and
    dropped, so points lying on an edge are never reported as vertices.
    """
    P = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(P) <= 2:
        return P

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in P:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in P[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


@dataclass(frozen=True, eq=False)
class Boundary2D:
    """Outer halfspaces and inner (attained) points of a planar range."""

    probes: ProbeBatch
    outer: list
    inner: np.ndarray
    vertices: np.ndarray
    scale: float

    @property
    def thetas(self) -> np.ndarray:
        return np.arctan2(self.probes.V[:, 1], self.probes.V[:, 0]) % (2 * np.pi)


def boundary2d(X, Y, C: WeightSpec, n_dirs: int = 720) -> Boundary2D:
    """Sample the boundary of ``conv W_C(X, Y)`` for Hermitian ``X, Y``.

    Hull vertices are computed from maximizers whose breakpoint gaps are
    positive, since a degenerate maximizer may sit anywhere on an edge.
    """
    if n_dirs < 8:
        raise ValueError("boundary2d needs at least 8 directions")
    A = X if isinstance(X, MatrixTuple) else MatrixTuple.of(X, Y, names=("X", "Y"))
    if A.m != 2:
        raise DimensionMismatch("boundary2d works on pairs")
    batch = support_many(A, C, sample_directions(2, n_dirs))
    scale = range_scale(A, C)
    outer = [Halfspace(batch.V[i], float(batch.h[i])) for i in range(len(batch))]
    pts = batch.points[batch.unique] if batch.unique.any() else batch.points
    cand = dedupe(pts, 1e-9 * scale)
    verts = planar_hull(cand, 1e-12 * scale * scale)
    return Boundary2D(batch, outer, batch.points, verts, scale)


def wk_complement_check(A: MatrixTuple, k: int, dirs, tol: float = SUPPORT_TOL) -> bool:
    """Check ``W_k(A) = (tr A_1, ..., tr A_m) - W_(n-k)(A)`` through supports.

    At each direction ``v`` the support of ``W_k`` must equal
    ``sum_j v_j tr A_j`` plus the support of ``W_(n-k)`` at ``-v``.
    """
    n = A.n
    if not 1 <= k <= n - 1:
        raise BadWeight(f"k must lie in [1, {n - 1}]")
    V = np.atleast_2d(np.asarray(dirs, dtype=float))
    Ck, Cnk = k_range(k, n), k_range(n - k, n)
    lhs = support_many(A, Ck, V).h
    traces = np.array([np.trace(a).real for a in A.A])
    rhs = V @ traces + support_many(A, Cnk, -V).h
    scale = range_scale(A, Ck)
    return bool(np.all(np.abs(lhs - rhs) <= tol * scale))


def diagonal_vertices(D: MatrixTuple, C: WeightSpec, max_n: int = 8) -> np.ndarray:
    """All permutation points ``(tr C P^t D_j P)_j`` of a diagonal tuple.

    Their convex hull is exactly ``W_C(D)``.  Returns an array of shape
    ``(N, m)`` with duplicates (within ``1e-10`` of scale) removed.
    """
    n = D.n
    if n > max_n:
        raise TooLarge(f"n = {n} exceeds the factorial guard {max_n}")
    S = D.stack()
    if any(fro(a - np.diag(np.diag(a))) > 0.0 for a in S):
        raise ValueError("diagonal_vertices needs diagonal matrices")
    d = np.real(np.einsum("jaa->ja", S)) if D.is_hermitian else np.einsum("jaa->ja", S)
    perms = np.array(list(itertools.permutations(range(n))))
    pts = (d[:, perms] @ C.c).T
    if np.iscomplexobj(pts):
        pts = np.stack([pts.real, pts.imag], axis=-1).reshape(len(pts), -1)
    return dedupe(pts, 1e-10 * range_scale(D, C))


def real_tuple(A: MatrixTuple) -> MatrixTuple:
    """Route a tuple into the Hermitian picture (identity on Hermitian tuples)."""
    return A.as_real()


def halfspaces(A: MatrixTuple, C: WeightSpec, V) -> list:
    batch = support_many(A, C, V)
    return [Halfspace(batch.V[i], float(batch.h[i])) for i in range(len(batch))]
