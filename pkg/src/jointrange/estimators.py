"""scikit-learn style wrappers.

``CNumericalRange`` is fitted on a matrix tuple (an array of shape
``(m, n, n)``) and then classifies points of ``R^d`` as inside or outside the
sampled outer approximation of ``conv W_C``; ``d = m`` for Hermitian tuples
and ``2m`` otherwise.  ``PolyhedralityTest`` runs :func:`decide_polyhedral`.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .crange import make_weight, range_scale, sample_directions, support_many
from .decide import POLYHEDRAL, decide_polyhedral
from .family import MatrixTuple


def _as_tuple(X) -> MatrixTuple:
    if isinstance(X, MatrixTuple):
        return X
    S = np.asarray(X)
    if S.ndim == 2:
        S = S[None]
    if S.ndim != 3 or S.shape[1] != S.shape[2]:
        raise ValueError(f"expected an array of shape (m, n, n), got {S.shape}")
    return MatrixTuple(tuple(S))


class CNumericalRange(TransformerMixin, BaseEstimator):
    """Outer polyhedral approximation of ``conv W_C(A)`` from support probes.

    Parameters
    ----------
    weight : int, sequence of float or dict, default=1
        Passed to :func:`make_weight`; an integer selects the k-range.
    n_dirs : int, default=720
    seed : int, default=0
    tol : float, default=1e-9
        Membership slack, relative to the range scale.

    Attributes
    ----------
    directions_ : ndarray of shape (n_probes, d)
    support_ : ndarray of shape (n_probes,)
    points_ : ndarray of shape (n_probes, d)
        Attained maximizers; every one of them lies in the range.
    scale_ : float
    n_features_in_ : int
    """

    def __init__(self, weight=1, n_dirs=720, seed=0, tol=1e-9):
        self.weight = weight
        self.n_dirs = n_dirs
        self.seed = seed
        self.tol = tol

    def fit(self, X, y=None):
        T = _as_tuple(X).as_real()
        C = make_weight(self.weight, T.n)
        V = sample_directions(T.m, self.n_dirs, self.seed)
        batch = support_many(T, C, V)
        self.weight_ = C
        self.matrices_ = T
        self.directions_ = batch.V
        self.support_ = batch.h
        self.points_ = batch.points
        self.scale_ = range_scale(T, C)
        self.n_features_in_ = T.m
        return self

    def decision_function(self, P):
        """Smallest halfspace slack; non-negative inside the approximation."""
        check_is_fitted(self, "support_")
        P = check_array(P)
        if P.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {P.shape[1]} features, expected {self.n_features_in_}")
        return np.min(self.support_[None, :] - P @ self.directions_.T, axis=1)

    def predict(self, P):
        return (self.decision_function(P) >= -self.tol * self.scale_).astype(int)

    def transform(self, V):
        """Support values of the fitted range at the unit rows of ``V``."""
        check_is_fitted(self, "support_")
        V = check_array(V)
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        return support_many(self.matrices_, self.weight_, V).h[:, None]


class PolyhedralityTest(BaseEstimator):
    """Estimator wrapper around :func:`decide_polyhedral`.

    After ``fit``: ``report_``, ``verdict_``, ``is_polyhedral_`` and ``ell_``.
    """

    def __init__(self, weight=1, n_dirs=720, seed=0, tol=1e-8):
        self.weight = weight
        self.n_dirs = n_dirs
        self.seed = seed
        self.tol = tol

    def fit(self, X, y=None):
        T = _as_tuple(X)
        C = make_weight(self.weight, T.n)
        self.report_ = decide_polyhedral(T, C, self.n_dirs, self.seed, self.tol)
        self.verdict_ = self.report_.verdict
        self.is_polyhedral_ = self.verdict_ == POLYHEDRAL
        self.ell_ = self.report_.params["ell"]
        return self
