"""Dense complex linear algebra used throughout the package.

Eigenvalues are always reported in descending order, which is the ordering the
support-function formulas consume directly.  Two Hermitian eigensolvers are
provided: LAPACK (via :func:`numpy.linalg.eigh`, the default) and a cyclic
complex Jacobi solver that has no dependency beyond numpy array arithmetic.
The Jacobi solver doubles as an independent check on the LAPACK path.

Randomness is drawn from :func:`numpy.random.default_rng`, i.e. the PCG64
bit generator, seeded with an explicit integer.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

TAU_EIG = 1e-13
TAU_HERM = 1e-10
MAX_SWEEPS = 50


class HermitianEig(NamedTuple):
    """Eigenvalues (descending) and matching unitary eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_square(A, name="matrix") -> np.ndarray:
    """Return ``A`` as a complex square array, rejecting non-finite entries."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def fro(A) -> float:
    return float(np.linalg.norm(A))


def hermitian_defect(A) -> float:
    """Relative Frobenius distance from ``A`` to its adjoint."""
    A = np.asarray(A)
    nrm = fro(A)
    if nrm == 0.0:
        return 0.0
    return fro(A - A.conj().T) / nrm


def check_hermitian(A, tol=TAU_HERM, name="matrix") -> np.ndarray:
    M = as_square(A, name)
    defect = hermitian_defect(M)
    if defect > tol:
        raise NotHermitian(f"{name} is not Hermitian (relative defect {defect:.3e} > {tol:.1e})")
    return (M + M.conj().T) / 2


def _jacobi(M: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    n = M.shape[0]
    A = M.copy()
    V = np.eye(n, dtype=complex)
    scale = fro(A)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V
    for _ in range(max_sweeps):
        off = fro(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            return np.real(np.diag(A)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                b = abs(apq)
                if b <= 1e-300:
                    continue
                phase = apq / b
                a, d = A[p, p].real, A[q, q].real
                theta = 0.5 * np.arctan2(2.0 * b, a - d)
                c, s = np.cos(theta), np.sin(theta)
                # column transform on the (p, q) plane: phase fix then real rotation
                G = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ G
    raise NoConvergence(f"Jacobi sweeps exceeded {max_sweeps}")


def jacobi_eigh(A, tol=TAU_EIG, max_sweeps=MAX_SWEEPS) -> HermitianEig:
    """Cyclic complex Jacobi eigensolver for a Hermitian matrix.

    Sweeps terminate once the off-diagonal Frobenius mass is at most
    ``tol * ||A||_F``.
    """
    M = check_hermitian(A)
    w, V = _jacobi(M, tol, max_sweeps)
    order = np.argsort(-w, kind="stable")
    return HermitianEig(w[order], V[:, order])


def herm_eig(A, method="lapack") -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix with descending eigenvalues.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Hermitian input; a relative Hermitian defect above ``1e-10`` raises
        :class:`NotHermitian`.
    method : {"lapack", "jacobi"}

    Returns
    -------
    HermitianEig
    """
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    M = check_hermitian(A)
    w, V = np.linalg.eigh(M)
    return HermitianEig(w[::-1].copy(), V[:, ::-1].copy())


def herm_eig_stack(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched descending eigendecomposition of a stack of Hermitian matrices.

    No Hermitian check is made; callers build the stack from checked parts.
    """
    w, V = np.linalg.eigh(M)
    return w[..., ::-1], V[..., ::-1]


def commutator_norm(X, Y) -> float:
    """Frobenius norm of ``XY - YX``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise DimensionMismatch(f"shapes {X.shape} and {Y.shape} differ")
    return fro(X @ Y - Y @ X)


def is_normal(A, tol=1e-10) -> bool:
    """True when ``||AA* - A*A||_F <= tol * ||A||_F**2``."""
    A = as_square(A)
    return fro(A @ A.conj().T - A.conj().T @ A) <= tol * fro(A) ** 2


def is_unitary(U, tol=1e-10) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return fro(U.conj().T @ U - np.eye(U.shape[0])) <= tol


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + Z.conj().T) / 2


def orth_complement(V: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the complement of the column span of ``V`` in C^n."""
    if V.shape[1] == 0:
        return np.eye(n, dtype=complex)
    if V.shape[1] >= n:
        return np.zeros((n, 0), dtype=complex)
    P = np.eye(n) - V @ V.conj().T
    w, W = np.linalg.eigh((P + P.conj().T) / 2)
    return W[:, np.argsort(-w)[: n - V.shape[1]]]
