"""Command-line entry point: ``deltafpt <command> [files] [options]``.

Every command prints one JSON report to stdout. Reports are deterministic
for identical inputs; wall-clock timings go to stderr with ``--timings``.

Exit codes: 0 solved (infeasible/unbounded included), 2 usage error,
3 input error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import DeltaFptError, InvariantViolation, ParseError
from .exactmat import IntMatrix, det, hnf, snf

SCHEMA = 1
SAFE_INT = 2 ** 53

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3, 4


class UsageError(Exception):
    kind = "usage-error"


def encode(obj):
    """JSON-ready form: big ints and non-integral rationals become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if -SAFE_INT <= obj <= SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return encode(obj.numerator)
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return "inf" if math.isinf(obj) else obj
    if isinstance(obj, IntMatrix):
        return [encode(row) for row in obj.rows]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


class Timer:
    def __init__(self):
        self.phases = {}

    def phase(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[name] = timer.phases.get(name, 0.0) + time.perf_counter() - self.t0

        return _Ctx()


def _read(path, digest):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    digest.update(len(data).to_bytes(8, "big"))
    digest.update(data)
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not UTF-8 text") from None


def _located(exc: ParseError, path):
    msg = f"{path}: {exc}"
    out = ParseError.__new__(ParseError)
    Exception.__init__(out, msg)
    out.line, out.column = exc.line, exc.column
    return out


def _load(path, parser, digest):
    text = _read(path, digest)
    try:
        return parser(text)
    except ParseError as exc:
        raise _located(exc, path) from None


# -- commands ---------------------------------------------------------

def cmd_hnf(args, digest, timer):
    from .textio import parse_matrix

    a = _load(args.matrix, parse_matrix, digest)
    with timer.phase("hnf"):
        res = hnf(a)
    h, u = res.h, res.u
    n = h.ncols
    checks = {
        "originalTimesU": a @ u == h,
        "unimodular": abs(det(u)) == 1,
        "lowerTriangular": all(h[i, j] == 0 for i in range(h.nrows) for j in range(i + 1, n)),
        "reducedRows": all(0 <= h[r, j] < h[r, c]
                           for c, r in enumerate(res.pivot_rows) for j in range(c)),
    }
    return {"h": h, "u": u, "pivotRows": res.pivot_rows, "checks": checks}


def cmd_snf(args, digest, timer):
    from .textio import parse_matrix

    a = _load(args.matrix, parse_matrix, digest)
    with timer.phase("snf"):
        res = snf(a)
    n = a.nrows
    diag = res.diagonal
    eye = IntMatrix.identity(n)
    checks = {
        "reassembly": res.p @ a @ res.q == res.s,
        "inverses": res.p @ res.p_inv == eye and res.q @ res.q_inv == eye,
        "diagonal": all(res.s[i, j] == 0 for i in range(n) for j in range(n) if i != j),
        "divisibility": all(diag[i + 1] % diag[i] == 0 for i in range(n - 1)),
    }
    return {"s": res.s, "p": res.p, "pInv": res.p_inv, "q": res.q, "qInv": res.q_inv,
            "diagonal": diag, "checks": checks}


def _norm(text):
    if text in ("inf", "infinity", "max"):
        return math.inf
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"norm must be a positive integer or 'inf', got {text!r}") from None
    if p < 1:
        raise argparse.ArgumentTypeError("norm must be >= 1")
    return p


def _vector_payload(inst, vec, extra=None):
    sysm = inst.system
    out = {
        "vector": sysm.to_original_rows(vec.x),
        "coefficients": sysm.original_coefficients(vec.t),
        "normValue": vec.norm_value,
        "method": vec.method,
    }
    if extra:
        out.update(extra)
    return out


def cmd_slvp(args, digest, timer):
    from .slvp import (SlvpInstance, fast_path_duplicate, fast_path_guaranteed, input_basis,
                       oracle_shortest, solve_dp)
    from .textio import parse_matrix

    if args.mode == "oracle" and args.box is None:
        raise UsageError("--mode oracle requires --box")
    a = _load(args.matrix, parse_matrix, digest)
    with timer.phase("canonicalize"):
        inst = SlvpInstance.from_matrix(a, args.norm)
    payload = {"norm": args.norm, "mode": args.mode, "n": inst.system.n, "d": inst.system.d,
               "delta": inst.system.delta_rank}
    with timer.phase("solve"):
        if args.mode == "fast":
            payload["guaranteed"] = fast_path_guaranteed(inst)
            vec = fast_path_duplicate(inst)
            if vec is None:
                payload["found"] = False
                return payload
            payload["found"] = True
        elif args.mode == "dp":
            vec = solve_dp(inst)
            payload["states"] = vec.stats.get("states")
        else:
            vec = oracle_shortest(inst, args.box, input_basis(inst.system))
            payload["box"] = args.box
    payload.update(_vector_payload(inst, vec))
    return payload


def cmd_cvp(args, digest, timer):
    from .slvp import SlvpInstance, input_basis, oracle_closest, solve_cvp
    from .textio import parse_matrix, parse_vector

    if args.mode == "oracle" and args.box is None:
        raise UsageError("--mode oracle requires --box")
    a = _load(args.matrix, parse_matrix, digest)
    target = _load(args.target, parse_vector, digest)
    if len(target) != a.nrows:
        from .errors import DimensionError

        raise DimensionError(f"target has {len(target)} entries, matrix has {a.nrows} rows")
    with timer.phase("canonicalize"):
        inst = SlvpInstance.from_matrix(a, args.norm)
    t_canon = inst.system.from_original_rows(target)
    with timer.phase("solve"):
        if args.mode == "dp":
            vec = solve_cvp(inst, t_canon)
        else:
            vec = oracle_closest(inst, t_canon, args.box, input_basis(inst.system))
    return _vector_payload(inst, vec, {"norm": args.norm, "mode": args.mode, "target": target})


def cmd_ilp(args, digest, timer):
    from .ilp import OPTIMAL, IlpInstance, lp_vertex_optimum, oracle_ilp, proximity_box, proximity_check, solve_ilp
    from .textio import parse_int_vector, parse_matrix

    h = _load(args.h, parse_matrix, digest)
    b = _load(args.b, parse_int_vector, digest)
    c = _load(args.c, parse_int_vector, digest)
    with timer.phase("setup"):
        inst = IlpInstance.build(h, b, c)
    with timer.phase("solve"):
        if args.mode == "dp":
            res = solve_ilp(inst)
        else:
            lp = lp_vertex_optimum(inst)
            if lp.status != OPTIMAL:
                res = solve_ilp(inst)  # status comes from the relaxation alone
            else:
                res = oracle_ilp(inst, proximity_box(inst, lp))
    payload = {"mode": args.mode, "status": res.status, "delta": inst.delta_rank}
    if res.caveat:
        payload["caveat"] = res.caveat
    if res.status == OPTIMAL:
        payload["x"] = res.x
        payload["objective"] = res.objective
        if res.lp_vertex is not None:
            payload["lpVertex"] = res.lp_vertex
            payload["basis"] = res.basis
            rep = proximity_check(inst, res)
            payload["proximity"] = {"slack": rep.slack, "maxSlack": rep.max_slack, "bound": rep.bound,
                                    "ratio": rep.ratio, "passed": rep.passed}
            payload["tieBreakExhaustive"] = res.tie_break_exhaustive
    return payload


def cmd_enum_par(args, digest, timer):
    from .geom import ParInstance, enumerate_par
    from .textio import parse_matrix, parse_vector

    a = _load(args.a, parse_matrix, digest)
    p = _load(args.p, parse_vector, digest)
    with timer.phase("enumerate"):
        res = enumerate_par(ParInstance.build(a, p))
    return {"points": res.points, "count": res.count, "hnfDiagonal": res.diagonal,
            "bounds": {"lower": res.lower, "upper": res.upper, "hold": res.bounds_hold}}


def cmd_cone(args, digest, timer):
    from .geom import ConeProgram, cone_feasible, cone_optimize
    from .textio import parse_int_vector, parse_matrix, parse_vector

    c = _load(args.c, parse_matrix, digest)
    p = _load(args.p, parse_vector, digest)
    a = _load(args.a, parse_matrix, digest)
    b = _load(args.b, parse_int_vector, digest)
    with timer.phase("solve"):
        if args.objective is None:
            res = cone_feasible(c, p, a, b)
        else:
            cvec = _load(args.objective, parse_int_vector, digest)
            res = cone_optimize(ConeProgram.build(c, p, a, b, cvec))
    out = {"status": res.status, "x": res.x, "cellPoints": res.cell_points}
    if res.objective is not None:
        out["objective"] = res.objective
    return out


def cmd_width(args, digest, timer):
    from .textio import parse_int_vector, parse_matrix
    from .width import SimplexInstance, load_families, oracle_width, width_from_subproblems

    h = _load(args.h, parse_matrix, digest)
    b = _load(args.b, parse_int_vector, digest)
    inst = SimplexInstance.build(h, b)
    payload = {"mode": args.mode, "vertices": inst.vertices}
    if args.mode == "oracle":
        if args.family_file is not None:
            raise UsageError("--families is only valid with --mode families")
        with timer.phase("oracle"):
            res = oracle_width(inst, args.box)
        payload.update({"width": res.width, "direction": res.direction, "box": res.box,
                        "boxCertified": res.box_certified})
        return payload
    if args.family_file is None:
        raise UsageError("--mode families requires --families FILE")
    n, fams = _load(args.family_file, load_families, digest)
    if n != inst.n:
        from .errors import DimensionError

        raise DimensionError(f"family file is for dimension {n}, simplex has dimension {inst.n}")
    with timer.phase("families"):
        dec = width_from_subproblems(inst, fams, jobs=args.jobs)
    payload.update({
        "width": dec.width,
        "families": [{"threshold": o.threshold, "rule": o.rule, "holds": o.holds,
                      "verdicts": [{"feasible": v.feasible, "witness": v.witness} for v in o.verdicts]}
                     for o in dec.families],
        "warnings": dec.warnings,
    })
    return payload


def cmd_suite(args, digest, timer):
    from .suites import SUITES

    digest.update(f"{args.name}:{args.seed}:{args.count}".encode())
    with timer.phase("suite"):
        return SUITES[args.name](args.seed, args.count)


# -- driver -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deltafpt", description="Exact solvers for lattice and integer "
                                 "programs with bounded subdeterminants.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--timings", action="store_true", help="print per-phase wall-clock times to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("hnf", cmd_hnf, "Hermite normal form"), ("snf", cmd_snf, "Smith normal form")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("matrix")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("slvp", help="shortest nonzero lattice vector")
    sp.add_argument("matrix")
    sp.add_argument("--norm", type=_norm, default=2)
    sp.add_argument("--mode", choices=("fast", "dp", "oracle"), default="dp")
    sp.add_argument("--box", type=int)
    sp.set_defaults(func=cmd_slvp)

    sp = sub.add_parser("cvp", help="closest lattice vector to a rational target")
    sp.add_argument("matrix")
    sp.add_argument("target")
    sp.add_argument("--norm", type=_norm, default=2)
    sp.add_argument("--mode", choices=("dp", "oracle"), default="dp")
    sp.add_argument("--box", type=int)
    sp.set_defaults(func=cmd_cvp)

    sp = sub.add_parser("ilp", help="integer program max c.x s.t. h x <= b")
    sp.add_argument("h")
    sp.add_argument("b")
    sp.add_argument("c")
    sp.add_argument("--mode", choices=("dp", "oracle"), default="dp")
    sp.set_defaults(func=cmd_ilp)

    sp = sub.add_parser("enum-par", help="integer points of p + A[0,1)^n")
    sp.add_argument("a")
    sp.add_argument("p")
    sp.set_defaults(func=cmd_enum_par)

    sp = sub.add_parser("cone", help="cone-restricted feasibility or optimisation")
    sp.add_argument("c", help="cone generator matrix")
    sp.add_argument("p", help="apex")
    sp.add_argument("a", help="constraint matrix")
    sp.add_argument("b", help="constraint right-hand side")
    sp.add_argument("--objective", help="objective vector file (feasibility only when omitted)")
    sp.set_defaults(func=cmd_cone)

    sp = sub.add_parser("width", help="lattice width of a simplex")
    sp.add_argument("h")
    sp.add_argument("b")
    sp.add_argument("--mode", choices=("oracle", "families"), default="oracle")
    sp.add_argument("--box", type=int)
    sp.add_argument("--families", dest="family_file")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_width)

    from .suites import SUITES

    sp = sub.add_parser("suite", help="randomized solver-versus-oracle suite")
    sp.add_argument("name", choices=sorted(SUITES))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.set_defaults(func=cmd_suite)
    return ap


def _error_report(command, digest, kind, exc):
    err = {"kind": kind, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["line"], err["column"] = exc.line, exc.column
    return {"schema": SCHEMA, "command": command, "inputsDigest": digest.hexdigest(),
            "status": "error", "error": err}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        ap.error("--jobs must be >= 1")
    digest = hashlib.sha256()
    timer = Timer()
    try:
        payload = args.func(args, digest, timer)
        report = {"schema": SCHEMA, "command": args.command, "inputsDigest": digest.hexdigest(),
                  "status": "ok", "payload": payload}
        code = EXIT_OK
    except UsageError as exc:
        report, code = _error_report(args.command, digest, exc.kind, exc), EXIT_USAGE
    except InvariantViolation as exc:
        report, code = _error_report(args.command, digest, exc.kind, exc), EXIT_INVARIANT
    except DeltaFptError as exc:
        report, code = _error_report(args.command, digest, exc.kind, exc), EXIT_INPUT
    sys.stdout.write(json.dumps(encode(report), indent=2, sort_keys=True) + "\n")
    if args.timings:
        for name, secs in timer.phases.items():
            print(f"{name}: {secs:.6f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
