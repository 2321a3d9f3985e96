"""Command-line front end.

Exit status: 0 for a definitive result, 1 for any error (including usage
errors), 2 when a decision is ``Inconclusive``.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .crange import boundary2d, make_weight, sample_directions, support_many
from .decide import (INCONCLUSIVE, _jsonable, decide_commuting, decide_polyhedral,
                     decide_via_conical)
from .errors import JointRangeError, ParseError, WrongArity
from .family import MatrixTuple
from .problem import DEMOS, Problem, demo, dump_problem, parse_problem
from .structure import CONE_MIN_SV, pinch_decompose

TOOL = "jointrange"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def load_problem(spec: str) -> Problem:
    """Load ``spec``: a path, ``-`` for stdin, or ``demo:NAME``."""
    if spec.startswith("demo:"):
        return demo(spec[5:])
    if spec == "-":
        return parse_problem(sys.stdin.read())
    try:
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {spec}: {exc}") from exc
    return parse_problem(text)


def _envelope(command: str, args, body: dict) -> dict:
    out = {"tool": TOOL, "version": __version__, "command": command,
           "seed": args.seed, "tol": args.tol}
    out.update(body)
    return out


def _dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def _weight(problem: Problem, args):
    if getattr(args, "k", None) is not None:
        return make_weight(int(args.k), problem.n)
    if problem.weight is None:
        return make_weight(1, problem.n)
    return problem.weight


def cmd_support(args) -> tuple:
    p = load_problem(args.problem)
    T = p.matrices.as_real()
    C = _weight(p, args)
    V = sample_directions(T.m, args.dirs, args.seed)
    batch = support_many(T, C, V)
    records = [{"v": batch.V[i], "h": float(batch.h[i]), "point": batch.points[i],
                "gaps": batch.gaps[i], "unique": bool(batch.unique[i])} for i in range(len(batch))]
    body = {"coordinates": list(T.names), "weight": C.to_dict(), "dirs": args.dirs,
            "records": records}
    return _dumps(_envelope("support", args, body)), 0


def _planar_pair(T: MatrixTuple) -> MatrixTuple:
    if T.m == 1:
        return MatrixTuple((T.A[0], np.zeros_like(T.A[0])), (T.names[0], "0"))
    if T.m != 2:
        raise WrongArity(f"boundary needs exactly 2 real coordinates, got {T.m}")
    return T


def cmd_boundary(args) -> tuple:
    p = load_problem(args.problem)
    T = _planar_pair(p.matrices.as_real())
    C = _weight(p, args)
    b = boundary2d(T, None, C, args.dirs)
    th = b.thetas
    if args.format == "json":
        body = {"coordinates": list(T.names), "weight": C.to_dict(), "dirs": args.dirs,
                "rows": [{"theta": th[i], "v": b.probes.V[i], "h": b.probes.h[i],
                          "point": b.probes.points[i]} for i in range(len(th))],
                "vertices": b.vertices}
        return _dumps(_envelope("boundary", args, body)), 0
    buf = io.StringIO()
    buf.write("theta,vx,vy,h,px,py\n")
    for i in range(len(th)):
        vals = [th[i], *b.probes.V[i], b.probes.h[i], *b.probes.points[i]]
        buf.write(",".join(repr(float(x)) for x in vals) + "\n")
    buf.write("\nvertex,x,y\n")
    for i, (x, y) in enumerate(b.vertices):
        buf.write(f"{i},{float(x)!r},{float(y)!r}\n")
    return buf.getvalue(), 0


def cmd_decide(args) -> tuple:
    p = load_problem(args.problem)
    if args.mode == "polyhedral":
        rep = decide_polyhedral(p.matrices, _weight(p, args), args.dirs, args.seed, args.tol)
    elif args.mode == "commute":
        rep = decide_commuting(p.matrices, "both", args.k, args.dirs, args.seed, args.tol)
    else:
        C = p.weight
        if C is None or len(C.distinct) != p.n:
            C = make_weight(np.arange(p.n, 0, -1).astype(float), p.n)
        rep = decide_via_conical(p.matrices, C, args.dirs, args.seed, args.tol, args.min_sv)
    body = {"mode": args.mode, "report": rep.to_dict()}
    status = 2 if rep.verdict == INCONCLUSIVE else 0
    return _dumps(_envelope("decide", args, body)), status


def cmd_demo(args) -> tuple:
    return dump_problem(demo(args.name)), 0


def cmd_pinch(args) -> tuple:
    p = load_problem(args.problem)
    P = p.matrices.A[0]
    split = tuple(args.split) if args.split else p.blocks
    if split is None:
        raise ParseError("pinch needs block sizes: give 'blocks' in the file or --split")
    d = pinch_decompose(P, split, tol=min(args.tol, 1e-9))
    resid = float(np.linalg.norm(d.reconstruct() - d.source))
    body = {"k": d.k, "blocks": list(d.blocks), "weights": d.weights,
            "projections": d.projections, "reconstruction_residual": resid}
    return _dumps(_envelope("pinch", args, body)), 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description="Joint C-numerical ranges and commutativity tests.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dirs_default=720):
        sp.add_argument("problem", help="problem JSON path, '-' for stdin, or demo:NAME")
        sp.add_argument("--dirs", type=_positive, default=dirs_default)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--out", default=None, metavar="PATH")

    sp = sub.add_parser("support", help="support values and maximizers per direction")
    common(sp)
    sp.set_defaults(func=cmd_support)

    sp = sub.add_parser("boundary", help="planar boundary samples and hull vertices")
    common(sp)
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("decide", help="polyhedrality / commutativity verdicts")
    common(sp)
    sp.add_argument("--mode", choices=("polyhedral", "commute", "conical"), default="polyhedral")
    sp.add_argument("--min-sv", type=float, default=CONE_MIN_SV, dest="min_sv",
                    help="conical acceptance threshold on normalized singular values")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("pinch", help="pinching of a projection as a convex combination")
    common(sp)
    sp.add_argument("--split", type=_positive, nargs="+", default=None)
    sp.set_defaults(func=cmd_pinch)

    sp = sub.add_parser("demo", help="print a built-in example as a problem file")
    sp.add_argument("name", help=f"one of {', '.join(sorted(DEMOS))}")
    sp.add_argument("--out", default=None, metavar="PATH")
    sp.set_defaults(func=cmd_demo)
    return parser


def _write_atomic(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".jointrange-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "format", None) == "csv" and args.command != "boundary":
            raise UsageError("--format csv is only available for boundary")
        text, status = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (JointRangeError, ValueError) as exc:
        print(f"{TOOL}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
