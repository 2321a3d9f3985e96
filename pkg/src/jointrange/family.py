"""Matrix tuples, their Hermitian expansion, span bases and affine maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyFamily, ScalarWeight, SingularMap
from .linalg import TAU_HERM, as_square, fro, hermitian_defect

SPAN_TOL = 1e-9
FLAT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """An ordered family ``(A_1, ..., A_m)`` of ``n x n`` complex matrices.

    ``names`` is carried along for error messages and report serialization.
    """

    A: tuple
    names: tuple = field(default=())

    def __post_init__(self):
        mats = tuple(as_square(a, f"A[{j}]") for j, a in enumerate(self.A))
        if not mats:
            raise EmptyFamily("a matrix tuple needs at least one member")
        n = mats[0].shape[0]
        for j, a in enumerate(mats):
            if a.shape[0] != n:
                raise DimensionMismatch(f"A[{j}] has dimension {a.shape[0]}, expected {n}")
        for a in mats:
            a.setflags(write=False)
        names = tuple(self.names) or tuple(f"A{j + 1}" for j in range(len(mats)))
        if len(names) != len(mats):
            raise ValueError("names must match the number of matrices")
        object.__setattr__(self, "A", mats)
        object.__setattr__(self, "names", names)

    @classmethod
    def of(cls, *mats, names=()) -> "MatrixTuple":
        return cls(tuple(mats), names=tuple(names))

    @property
    def n(self) -> int:
        return self.A[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.A)

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.A)

    def __getitem__(self, j):
        return self.A[j]

    @property
    def H(self) -> list:
        return hermitian_expand(self)

    @property
    def is_hermitian(self) -> bool:
        return all(hermitian_defect(a) <= TAU_HERM for a in self.A)

    def as_real(self) -> "MatrixTuple":
        """The tuple itself if Hermitian, else its Hermitian expansion.

        This is the identification of a range in ``C^m`` with one in
        ``R^(2m)``: coordinate ``2j`` is the real part and ``2j + 1`` the
        imaginary part of coordinate ``j``.
        """
        if self.is_hermitian:
            return MatrixTuple(tuple((a + a.conj().T) / 2 for a in self.A), self.names)
        names = []
        for nm in self.names:
            names += [f"Re({nm})", f"Im({nm})"]
        return MatrixTuple(tuple(self.H), tuple(names))

    def stack(self) -> np.ndarray:
        return np.stack(self.A)

    def conjugate(self, U) -> "MatrixTuple":
        """``U* A_j U`` for every member."""
        U = np.asarray(U)
        return MatrixTuple(tuple(U.conj().T @ a @ U for a in self.A), self.names)


def hermitian_expand(A: MatrixTuple) -> list:
    """Split each ``A_j`` into ``H_(2j-1) + i H_(2j)`` with Hermitian parts.

    Members whose skew part vanishes still contribute a zero matrix so that
    indices stay aligned with ``A``.
    """
    out = []
    for a in A.A:
        out.append((a + a.conj().T) / 2)
        out.append((a - a.conj().T) / 2j)
    return out


def span_basis(F: Sequence, tol: float = SPAN_TOL) -> MatrixTuple:
    """Maximal linearly independent sub-collection of ``F``, in input order.

    Gram-Schmidt on the vectorized matrices with the Frobenius inner product;
    a member is kept iff its residual after projection exceeds ``tol`` times
    its own norm.
    """
    mats = [as_square(x) for x in F]
    if not mats:
        raise EmptyFamily("span_basis needs a non-empty family")
    n = mats[0].shape[0]
    if any(x.shape[0] != n for x in mats):
        raise DimensionMismatch("all members must share one dimension")
    names = list(F.names) if isinstance(F, MatrixTuple) else [f"F{j + 1}" for j in range(len(mats))]
    Q = []
    keep = []
    for j, x in enumerate(mats):
        v = x.ravel()
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        r = v.copy()
        for _ in range(2):  # re-orthogonalize once for stability
            for q in Q:
                r -= np.vdot(q, r) * q
        nr = np.linalg.norm(r)
        if nr > tol * nv:
            Q.append(r / nr)
            keep.append(j)
    if not keep:
        # the zero family spans {0}; keep the first member so a tuple exists
        keep = [0]
    return MatrixTuple(tuple(mats[j] for j in keep), tuple(names[j] for j in keep))


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``a -> R a + f`` on points, ``B_i = sum_j R[i, j] A_j + f_i I`` on tuples."""

    R: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=complex if np.iscomplexobj(self.R) else float))
        f = np.atleast_1d(np.asarray(self.f, dtype=complex if np.iscomplexobj(self.f) else float))
        if R.shape[0] != R.shape[1] or f.shape != (R.shape[0],):
            raise DimensionMismatch(f"R must be m x m and f length m, got {R.shape} and {f.shape}")
        if not np.isfinite(np.linalg.cond(R)) or np.linalg.cond(R) >= 1e12:
            raise SingularMap(f"R is not invertible (condition {np.linalg.cond(R):.3e})")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "f", f)


def apply_affine(obj, amap: AffineMap):
    """Apply ``amap`` to a :class:`MatrixTuple` or to an array of points.

    Points are given as an array of shape ``(m,)`` or ``(N, m)``.
    """
    R, f = amap.R, amap.f
    m = R.shape[0]
    if isinstance(obj, MatrixTuple):
        if obj.m != m:
            raise DimensionMismatch(f"map acts on {m}-tuples, got {obj.m}")
        S = obj.stack()
        B = np.einsum("ij,jkl->ikl", R, S) + f[:, None, None] * np.eye(obj.n)
        return MatrixTuple(tuple(B), tuple(f"B{i + 1}" for i in range(m)))
    P = np.asarray(obj)
    if P.shape[-1] != m:
        raise DimensionMismatch(f"points must have {m} coordinates, got {P.shape[-1]}")
    return P @ R.T + f


@dataclass(frozen=True, eq=False)
class FlatKind:
    """Outcome of :func:`classify_flat`; ``witness`` is set for segments."""

    kind: str
    witness: np.ndarray | None = None

    def __repr__(self):
        return f"FlatKind({self.kind!r})"


def classify_flat(A: MatrixTuple, C, tol: float = FLAT_TOL) -> FlatKind:
    """Decide whether ``W_C(A)`` is a point, a line segment, or larger.

    The range is a singleton iff every member is scalar, and a segment iff all
    Hermitian parts lie in ``span{I, H}`` for one non-scalar Hermitian ``H``.
    ``C`` must be non-scalar; pass a :class:`~jointrange.crange.WeightSpec` or
    a weight vector.
    """
    c = np.asarray(getattr(C, "c", C), dtype=float)
    if c.max() - c.min() <= 0.0:
        raise ScalarWeight("classify_flat needs a non-scalar weight")
    n = A.n
    parts = hermitian_expand(A)
    scale = max(fro(h) for h in parts)
    if scale == 0.0:
        return FlatKind("singleton")
    eye = np.eye(n)
    traceless = [h - np.trace(h).real / n * eye for h in parts]
    if all(fro(g) <= tol * scale for g in traceless):
        return FlatKind("singleton")
    G = next(g for g in traceless if fro(g) > tol * scale)
    gg = np.vdot(G, G).real
    for g in traceless:
        resid = g - (np.vdot(G, g).real / gg) * G
        if fro(resid) > tol * scale:
            return FlatKind("higher")
    return FlatKind("segment", G / fro(G))
