"""Decision procedures: polyhedrality of ``W_C`` and commutativity of families.

Verdicts are returned as :class:`AnalysisReport` objects that carry the
certificate backing them and every parameter needed to reproduce the run.
All geometric statements concern the convex hull of the range.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .crange import (WeightSpec, k_range, make_weight, range_scale, sample_directions,
                     support_values)
from .errors import BadWeight, GammaOutOfRange, NotCommutingNormal, RouteDisagreement
from .family import MatrixTuple, hermitian_expand, span_basis
from .linalg import fro, is_normal
from .structure import (BLOCK_TOL, CONE_MIN_SV, extract_blocks, find_conical,
                        simultaneous_diagonalize, verify_conical_blocks)

POLYHEDRAL = "Polyhedral"
NOT_POLYHEDRAL = "NotPolyhedral"
COMMUTING = "CommutingNormal"
NOT_COMMUTING = "NotCommutingNormal"
SINGLETON = "Singleton"
SEGMENT = "Segment"
INCONCLUSIVE = "Inconclusive"

GAP_TOL = 1e-8
HULL_NOTE = "geometric statements refer to the convex hull of the range"


@dataclass(eq=False)
class AnalysisReport:
    verdict: str
    route: str
    certificate: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    note: str = HULL_NOTE

    @property
    def definitive(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "certificate": _jsonable(self.certificate),
            "params": _jsonable(self.params),
            "note": self.note,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"real": _jsonable(x.real.tolist()), "imag": _jsonable(x.imag.tolist())}
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _real(A) -> MatrixTuple:
    T = A if isinstance(A, MatrixTuple) else MatrixTuple(tuple(A))
    return T.as_real()


def _topk(T: MatrixTuple, k: int, V: np.ndarray) -> np.ndarray:
    c = np.zeros(T.n)
    c[:k] = 1.0
    return support_values(T, c, V)


def _refine_gap(T: MatrixTuple, Dt: MatrixTuple, k: int, v0: np.ndarray) -> tuple:
    """Locally maximize the support gap starting from ``v0`` (Nelder-Mead)."""

    def neg_gap(x):
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return 0.0
        v = (x / nx)[None, :]
        return -(_topk(T, k, v)[0] - _topk(Dt, k, v)[0])

    res = minimize(neg_gap, v0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
    v = res.x / np.linalg.norm(res.x)
    return v, -neg_gap(v)


def decide_polyhedral(A, C: WeightSpec, n_dirs: int = 720, seed: int = 0,
                      tol: float = BLOCK_TOL, refine: bool = True,
                      hat_check: bool = True) -> AnalysisReport:
    """Decide whether ``conv W_C(A)`` is polyhedral.

    With ``k = gamma(C)``, the range is polyhedral iff the maximal common
    diagonal block ``D`` of the (Hermitian) tuple has size ``ell >= 2k`` and
    ``W_k(A) = W_k(D)``.  The first condition is checked exactly; the second
    through the support functions over sampled directions, followed by a
    local search for a positive gap around the worst samples.

    A Polyhedral certificate also records the truncated weight of the
    diagonal block and, when ``hat_check`` is set, the largest sampled
    deviation between the supports of ``W_(C - c_(k+1) I)(A)`` and
    ``W_hat(D)``.
    """
    T = _real(A)
    n, m = T.n, T.m
    if C.n != n:
        raise BadWeight(f"weight length {C.n} does not match n = {n}")
    if C.is_scalar:
        raise BadWeight("scalar weight")
    k = C.gamma
    if not 1 <= k <= n // 2:
        raise GammaOutOfRange(f"gamma(C) = {k} outside [1, {n // 2}]")
    params = {"n": n, "m": m, "weight": C.to_dict(), "gamma": k, "n_dirs": n_dirs,
              "seed": seed, "tol": tol, "gap_tol": GAP_TOL}
    blocks = extract_blocks(T, tol)
    ell = blocks.ell
    params["ell"] = ell
    cert = {"ell": ell, "two_k": 2 * k}
    if ell < 2 * k:
        cert["reason"] = "ell < 2k"
        return AnalysisReport(NOT_POLYHEDRAL, "structural", cert, params)
    scale = range_scale(T, k_range(k, n))
    if ell < n:
        Dt = MatrixTuple(tuple(blocks.D))
        V = sample_directions(m, n_dirs, seed)
        gap = _topk(T, k, V) - _topk(Dt, k, V)
        i = int(np.argmax(gap))
        v, g = V[i], float(gap[i])
        if refine and g <= GAP_TOL * scale and m > 1:
            for j in np.argsort(-gap, kind="stable")[:3]:
                v2, g2 = _refine_gap(T, Dt, k, V[j])
                if g2 > g:
                    v, g = v2, g2
        if g > GAP_TOL * scale:
            cert.update(reason="support gap between W_k(A) and W_k(D)", direction=v, gap=g)
            return AnalysisReport(NOT_POLYHEDRAL, "geometric", cert, params)
        cert["max_sampled_gap"] = g
    cert.update(U=blocks.U, D=[np.diag(d) for d in blocks.D])
    if hat_check:
        cert.update(_hat_c(T, blocks, C, n_dirs, seed))
    else:
        cert["hat_c"] = hat_weight(C, ell)
    route = "structural" if ell == n else "both"
    return AnalysisReport(POLYHEDRAL, route, cert, params)


def hat_weight(C: WeightSpec, ell: int) -> np.ndarray:
    """Truncated weight on the diagonal block: shift by ``c_(k+1)``, keep the
    top ``k`` and bottom ``ell - k`` entries."""
    k, n, c = C.gamma, C.n, C.c
    shift = c[k]
    return np.concatenate([c[:k] - shift, c[k + n - ell:] - shift])


def _hat_c(T: MatrixTuple, blocks, C: WeightSpec, n_dirs: int, seed: int) -> dict:
    chat = hat_weight(C, blocks.ell)
    Dt = MatrixTuple(tuple(blocks.D))
    V = sample_directions(T.m, n_dirs, seed)
    lhs = support_values(T, C.c - C.c[C.gamma], V)
    rhs = support_values(Dt, chat, V)
    return {"hat_c": chat, "hat_c_max_deviation": float(np.max(np.abs(lhs - rhs)))}


def _default_k(n: int, k) -> int:
    if k is None:
        return n // 2
    k = int(k)
    if not (1 <= k <= n - 1 and abs(n / 2 - k) <= 1):
        raise BadWeight(f"k = {k} must satisfy 1 <= k <= n-1 and |n/2 - k| <= 1")
    return k


def _algebraic(basis: MatrixTuple, tol: float) -> tuple:
    for j, a in enumerate(basis.A):
        if not is_normal(a, tol):
            nrm = fro(a)
            res = fro(a @ a.conj().T - a.conj().T @ a) / (nrm * nrm)
            return False, {"reason": "member not normal", "member": basis.names[j],
                           "residual": res}
    for r, s in itertools.combinations(range(basis.m), 2):
        X, Y = basis.A[r], basis.A[s]
        res = fro(X @ Y - Y @ X) / (fro(X) * fro(Y))
        if res > tol:
            return False, {"reason": "members do not commute",
                           "pair": [basis.names[r], basis.names[s]], "residual": res}
    return True, {}


def _geometric(basis: MatrixTuple, k: int, n_dirs: int, seed: int, tol: float) -> tuple:
    n = basis.n
    parts = span_basis(MatrixTuple(tuple(hermitian_expand(basis))), tol=1e-9)
    C = k_range(k, n)
    if parts.m == 1:
        rep = decide_polyhedral(parts, C, n_dirs, seed, tol, hat_check=False)
        return rep.verdict == POLYHEDRAL, {"pairs_checked": 0}
    checked = 0
    for u, v in itertools.combinations(range(parts.m), 2):
        pair = MatrixTuple((parts.A[u], parts.A[v]))
        rep = decide_polyhedral(pair, C, n_dirs, seed, tol, hat_check=False)
        checked += 1
        if rep.verdict != POLYHEDRAL:
            return False, {"reason": "pair range not polyhedral", "pair": [u, v],
                           "pair_report": rep.to_dict()["certificate"]}
    return True, {"pairs_checked": checked}


def decide_commuting(F, mode: str = "both", k=None, n_dirs: int = 720, seed: int = 0,
                     tol: float = BLOCK_TOL) -> AnalysisReport:
    """Decide whether ``F`` consists of mutually commuting normal matrices.

    The family is first reduced to a basis of its span.  The algebraic route
    checks normality and pairwise commutators of the basis; the geometric
    route decides polyhedrality of ``W_k(G_u, G_v)`` for every pair of a
    linearly independent set of Hermitian parts, with ``|n/2 - k| <= 1``
    (default ``k = floor(n/2)``).

    Raises
    ------
    RouteDisagreement
        In ``mode="both"`` when the two routes differ.
    """
    if mode not in ("algebraic", "geometric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    basis = span_basis(F if isinstance(F, MatrixTuple) else list(F))
    n = basis.n
    params = {"n": n, "basis_size": basis.m, "mode": mode, "n_dirs": n_dirs, "seed": seed,
              "tol": tol}
    if n == 1:
        params["k"] = None
        return AnalysisReport(COMMUTING, mode, {"U": np.eye(1)}, params)
    k = _default_k(n, k)
    params["k"] = k
    verdicts, cert = {}, {}
    if mode in ("algebraic", "both"):
        ok, info = _algebraic(basis, tol)
        verdicts["algebraic"] = ok
        cert["algebraic"] = info
    if mode in ("geometric", "both"):
        ok, info = _geometric(basis, k, n_dirs, seed, tol)
        verdicts["geometric"] = ok
        cert["geometric"] = info
    if len(set(verdicts.values())) > 1:
        raise RouteDisagreement(f"routes disagree: {verdicts}")
    ok = next(iter(verdicts.values()))
    if ok:
        try:
            cert["U"] = simultaneous_diagonalize(basis, tol)
        except NotCommutingNormal as exc:
            raise RouteDisagreement(f"routes accept but diagonalization fails: {exc}") from exc
    return AnalysisReport(COMMUTING if ok else NOT_COMMUTING, mode, cert, params)


def decide_via_conical(A, C: WeightSpec, n_dirs: int = 2000, seed: int = 0,
                       tol: float = BLOCK_TOL, min_sv: float = CONE_MIN_SV) -> AnalysisReport:
    """One-directional test: a conical point with simple ``C`` forces commutativity.

    ``C`` must have ``n`` distinct eigenvalues.  When no conical point is found
    at the sampling resolution the verdict is ``Inconclusive``.
    """
    T = _real(A)
    if len(C.distinct) != T.n:
        raise BadWeight("decide_via_conical needs a weight with n distinct entries")
    params = {"n": T.n, "m": T.m, "weight": C.to_dict(), "n_dirs": n_dirs, "seed": seed,
              "tol": tol, "min_sv": min_sv}
    certs = find_conical(T, C, n_dirs, seed, min_sv=min_sv)
    params["conical_points"] = len(certs)
    if not certs:
        return AnalysisReport(INCONCLUSIVE, "geometric",
                              {"reason": f"no conical point found at resolution {n_dirs}"}, params)
    verified = [c for c in certs if verify_conical_blocks(T, C, c.unitary, tol)]
    try:
        U = simultaneous_diagonalize(T, tol)
    except NotCommutingNormal as exc:
        cert = {"reason": "conical candidates failed block verification" if not verified
                else "diagonalization failed", "pair": exc.pair, "residual": exc.residual,
                "candidates": [c.point for c in certs]}
        return AnalysisReport(NOT_COMMUTING, "structural", cert, params)
    cert = {"U": U, "points": [c.point for c in verified or certs]}
    return AnalysisReport(COMMUTING, "geometric" if verified else "structural", cert, params)


def classify(A, C: WeightSpec) -> AnalysisReport:
    """Singleton / segment classification wrapped as a report."""
    from .family import classify_flat

    T = A if isinstance(A, MatrixTuple) else MatrixTuple(tuple(A))
    kind = classify_flat(T, C)
    verdict = {"singleton": SINGLETON, "segment": SEGMENT}.get(kind.kind, INCONCLUSIVE)
    cert = {"witness": kind.witness} if kind.witness is not None else {}
    return AnalysisReport(verdict, "structural", cert, {"weight": C.to_dict()})


__all__ = [
    "AnalysisReport", "decide_polyhedral", "decide_commuting", "decide_via_conical",
    "classify", "hat_weight", "make_weight",
]
