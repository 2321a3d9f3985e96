"""JSON problem files and the built-in example fixtures.

A problem file is a single JSON object::

    {
      "n": 2,
      "matrices": [
        {"name": "A", "real": [[1, 0], [0, 0]], "imag": [[0, 0], [0, 0]]}
      ],
      "weight": {"k": 1},
      "blocks": [1, 1]
    }

``imag`` may be omitted for real matrices; ``weight`` is either ``{"k": k}``
or ``{"c": [...]}``; ``blocks`` is optional.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .crange import WeightSpec, make_weight
from .errors import ParseError, UnknownDemo
from .family import MatrixTuple


@dataclass(frozen=True, eq=False)
class Problem:
    matrices: MatrixTuple
    weight: WeightSpec | None
    blocks: tuple | None = None

    @property
    def n(self) -> int:
        return self.matrices.n


def _grid(raw, n: int, label: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != n:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise ParseError(f"{label} must have {n} rows, got {got}")
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"{label} row {i} has {got} entries, expected {n}")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"{label} row {i} has a non-numeric entry {x!r}")
    return np.array(raw, dtype=float)


def parse_problem(doc) -> Problem:
    """Validate a decoded JSON document (or JSON text) into a :class:`Problem`."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("problem file must be a JSON object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError("'n' must be a positive integer")
    mats = doc.get("matrices")
    if not isinstance(mats, list) or not mats:
        raise ParseError("'matrices' must be a non-empty list")
    arrays, names = [], []
    for j, entry in enumerate(mats):
        if not isinstance(entry, dict) or "real" not in entry:
            raise ParseError(f"matrix {j} needs a 'real' grid")
        name = str(entry.get("name", f"A{j + 1}"))
        re = _grid(entry["real"], n, f"matrix {name!r} real")
        im = _grid(entry["imag"], n, f"matrix {name!r} imag") if "imag" in entry else np.zeros((n, n))
        arrays.append(re + 1j * im)
        names.append(name)
    weight = None
    if "weight" in doc and doc["weight"] is not None:
        try:
            weight = make_weight(doc["weight"], n)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad weight: {exc}") from exc
    blocks = doc.get("blocks")
    if blocks is not None:
        if not isinstance(blocks, list) or not all(isinstance(b, int) and b > 0 for b in blocks) \
                or sum(blocks) != n:
            raise ParseError(f"'blocks' must be positive integers summing to {n}")
        blocks = tuple(blocks)
    return Problem(MatrixTuple(tuple(arrays), tuple(names)), weight, blocks)


def problem_to_dict(p: Problem) -> dict:
    out = {"n": p.n, "matrices": []}
    for name, a in zip(p.matrices.names, p.matrices.A):
        out["matrices"].append({"name": name, "real": a.real.tolist(), "imag": a.imag.tolist()})
    if p.weight is not None:
        out["weight"] = p.weight.to_dict()
    if p.blocks is not None:
        out["blocks"] = list(p.blocks)
    return out


def dump_problem(p: Problem) -> str:
    return json.dumps(problem_to_dict(p), indent=2) + "\n"


def _ex31() -> Problem:
    w = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    A = np.zeros((5, 5), dtype=complex)
    A[0, 0], A[1, 1], A[2, 2] = 1, w, w * w
    A[3, 4] = 0.1
    return Problem(MatrixTuple((A,), ("A",)), make_weight(1, 5), (3, 2))


def _ex32() -> Problem:
    A = np.zeros((6, 6), dtype=complex)
    A[:4, :4] = np.diag([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
    A[4:, 4:] = [[1, 1], [-1, -1]]
    return Problem(MatrixTuple((A,), ("A",)), make_weight(1, 6), (4, 2))


def _ex52() -> Problem:
    A1 = np.diag([1.0, 1, -1, -1, 1, -1]).astype(complex)
    A2 = np.zeros((6, 6), dtype=complex)
    A2[:4, :4] = np.diag([1.0, -1, 1, -1])
    A2[4:, 4:] = [[0, 1j], [-1j, 0]]
    A3 = np.zeros((6, 6), dtype=complex)
    A3[0, 0] = 1
    A3[1:3, 1:3] = [[0, 1j], [-1j, 0]]
    A3[3:, 3:] = np.diag([1.0, -1, -1])
    return Problem(MatrixTuple((A1, A2, A3), ("A1", "A2", "A3")), make_weight(1, 6))


DEMOS = {"ex3.1": _ex31, "ex3.2": _ex32, "ex5.2": _ex52}


def demo(name: str) -> Problem:
    try:
        return DEMOS[name]()
    except KeyError:
        raise UnknownDemo(f"unknown demo {name!r}; valid names: {', '.join(sorted(DEMOS))}") from None


def random_commuting_family(n: int, size: int, seed: int) -> list:
    """``size`` normal matrices ``V D_i V*`` sharing one Haar unitary ``V``."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    V, R = np.linalg.qr(Z)
    V = V * (np.diag(R) / np.abs(np.diag(R)))
    out = []
    for _ in range(size):
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        out.append((V * d) @ V.conj().T)
    return out
