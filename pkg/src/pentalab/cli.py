"""Command-line front end.  Every command writes one JSON report.

Exit codes: 0 all checks pass, 1 a check failed, 2 unreadable input,
3 geometric degeneracy, 4 map singularity, 5 singular condensation.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import condensation as cd
from . import dynamics as dy
from . import fileio as fio
from . import reconstruct as rc
from . import vanishing as vn
from .invariants import eval_E, eval_O, invariant_tuple, swap_blocks
from .projective import CoincidentArguments, DegenerateQuadruple, NotCollinear, omega_invariants

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_SINGULAR, EXIT_CONDENSE = 0, 1, 2, 3, 4, 5

EPILOG = """exit codes:
  0  all internal checks passed
  1  a check failed (details in the report)
  2  input could not be parsed
  3  geometric degeneracy (report names the label)
  4  the pentagram map hit a pole (report names the step)
  5  condensation met a zero interior label

PENTALAB_SEED sets the default --seed."""


class Failure(Exception):
    def __init__(self, code: int, message: str, **detail):
        super().__init__(message)
        self.code = code
        self.detail = detail


def _fmt_all(xs) -> List[str]:
    return [fio.fmt(v) for v in xs]


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_seed() -> int:
    raw = os.environ.get("PENTALAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"PENTALAB_SEED must be an integer, got {raw!r}")


# -- commands ------------------------------------------------------------------

def invariant_table(x: Sequence[Fraction]) -> Dict[str, Any]:
    n = len(x) // 2
    ks = list(range(1, n // 2 + 1)) + [n]
    return {"O": {str(k): fio.fmt(eval_O(x, k)) for k in ks},
            "E": {str(k): fio.fmt(eval_E(x, k)) for k in ks}}


def cmd_invariants(args) -> Dict[str, Any]:
    P = fio.load_polygon(args.polygon)
    try:
        x = dy.extract_invariants(P)
    except dy.DegenerateConstruction as exc:
        raise Failure(EXIT_DEGENERATE, str(exc), label=exc.label)
    out = {"x": _fmt_all(x), **invariant_table(x)}
    try:
        formula = rc.omega_from_invariants(x)
        geometric = omega_invariants(rc.geometric_monodromy(x))
        out["omega_formula"] = _fmt_all(formula)
        out["omega_geometric"] = _fmt_all(geometric)
        agree = formula == geometric
    except (rc.ZeroLeadingInvariant, ZeroDivisionError, ValueError) as exc:
        out["omega_error"] = str(exc)
        agree = False
    out["omega_agree"] = agree
    out["degenerate"] = {
        "geometric": dy.is_degenerate(P) if P.is_periodic() else None,
        "coords_class1": dy.degeneracy_coords(x, 1),
        "coords_class3": dy.degeneracy_coords(x, 3),
    }
    out["pass"] = agree
    return out


def _write_svg(path: str, x: Sequence[Fraction]) -> None:
    P = rc.build_polypoint(x)
    pts = [(float(a / c), float(b / c)) for a, b, c in P.reps if c != 0]
    if not pts:
        pts = [(0.0, 0.0)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, y0 = min(xs), min(ys)
    span = max(max(xs) - x0, max(ys) - y0) or 1.0
    scaled = [((px - x0) / span * 480 + 10, (1 - (py - y0) / span) * 480 + 10) for px, py in pts]
    poly = " ".join(f"{a:.6f},{b:.6f}" for a, b in scaled)
    dots = "".join(f'<circle cx="{a:.6f}" cy="{b:.6f}" r="3"/>' for a, b in scaled)
    with open(path, "w") as fh:
        fh.write('<?xml version="1.0" encoding="UTF-8"?>\n'
                 '<svg xmlns="http://www.w3.org/2000/svg" width="500" height="500" viewBox="0 0 500 500">'
                 f'<polygon points="{poly}" fill="none" stroke="black"/>{dots}</svg>\n')


def cmd_iterate(args) -> Dict[str, Any]:
    if args.steps < 1:
        raise Failure(EXIT_PARSE, "--steps must be at least 1")
    P = fio.load_polygon(args.polygon)
    try:
        x = dy.extract_invariants(P)
    except dy.DegenerateConstruction as exc:
        raise Failure(EXIT_DEGENERATE, str(exc), label=exc.label)
    maps = {"alpha1": [dy.alpha1], "alpha2": [dy.alpha2], "alternate": [dy.alpha1, dy.alpha2]}[args.map]
    orbit = [tuple(x)]
    for step in range(1, args.steps + 1):
        try:
            orbit.append(maps[(step - 1) % len(maps)](orbit[-1]))
        except dy.MapSingularity as exc:
            raise Failure(EXIT_SINGULAR, str(exc), step=step, index=exc.index)
    tuples = [invariant_tuple(v) for v in orbit]
    swaps = all(tuples[s] == swap_blocks(tuples[s - 1]) for s in range(1, len(tuples)))
    if args.svg:
        os.makedirs(args.svg, exist_ok=True)
        for s, v in enumerate(orbit):
            try:
                _write_svg(os.path.join(args.svg, f"step_{s:03d}.svg"), v)
            except (ZeroDivisionError, ValueError) as exc:
                raise Failure(EXIT_DEGENERATE, f"cannot draw step {s}: {exc}", step=s)
    return {"map": args.map,
            "steps": [{"step": s, "x": _fmt_all(v), "invariants": _fmt_all(t)}
                      for s, (v, t) in enumerate(zip(orbit, tuples))],
            "swap_each_step": swaps, "pass": swaps}


def cmd_collapse(args) -> Dict[str, Any]:
    if args.N < 1:
        raise Failure(EXIT_PARSE, "--N must be positive")
    try:
        r = cd.collapse_experiment(args.N, args.seed)
    except dy.MapSingularity as exc:
        raise Failure(EXIT_SINGULAR, str(exc), step=exc.step)
    cond = r["condensation"]
    expected = 2 * args.N - 2
    ok = (r["collapse_step"] == expected and all(r["profile"].values())
          and cond["constant_line_distance"] == expected + 2
          and cond["degenerate_strip"] == r["collapse_step"])
    r["trace"] = [bool(t) for t in r["trace"]]
    r["expected_single_step"] = expected
    r["pass"] = ok
    return r


def cmd_condense(args) -> Dict[str, Any]:
    M = fio.matrix_from_json(fio.load_json(args.matrix))
    oracle = cd.bareiss_det(M)
    out = {"size": len(M), "oracle": fio.fmt(oracle)}
    try:
        d = cd.dodgson_det(M)
        out["retries"] = 0
    except cd.SingularInterior as exc:
        if not args.retry:
            raise Failure(EXIT_CONDENSE, str(exc), position=list(exc.position))
        d, used = cd.dodgson_det_retry(M, seed=args.seed)
        out["retries"] = used
    out["determinant"] = fio.fmt(d)
    out["pass"] = d == oracle
    return out


def cmd_vanishing(args) -> Dict[str, Any]:
    if args.n_max < 5:
        raise Failure(EXIT_PARSE, "--n-max must be at least 5")
    reports = [vn.vanishing_check(n) for n in range(5, args.n_max + 1, 2)]
    rows = [dict(r, path_delta=f"{r['path_delta']:.3e}") for rep in reports for r in rep["rows"]]
    return {"rows": rows, "pass": all(rep["pass"] for rep in reports)}


def cmd_independence(args) -> Dict[str, Any]:
    return vn.independence_check(args.n, seed=args.seed)


def cmd_reconstruct(args) -> Dict[str, Any]:
    x = fio.coords_from_dict(fio.load_json(args.invariants))
    try:
        P, L = rc.build_polypoint(x), rc.build_polyline(x)
        back_p, back_l = dy.extract_invariants(P), dy.extract_invariants(L)
    except (dy.DegenerateConstruction, ZeroDivisionError, ValueError) as exc:
        raise Failure(EXIT_DEGENERATE, str(exc), label=getattr(exc, "label", None))
    ok = list(back_p) == list(x) and list(back_l) == list(x)
    return {"polypoint": fio.polygon_to_dict(P), "polyline": fio.polygon_to_dict(L),
            "roundtrip": ok, "pass": ok}


COMMANDS = {
    "invariants": cmd_invariants, "iterate": cmd_iterate, "collapse": cmd_collapse,
    "condense": cmd_condense, "vanishing": cmd_vanishing,
    "independence": cmd_independence, "reconstruct": cmd_reconstruct,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: PENTALAB_SEED or 0)")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="pentalab", description="Exact experiments with the pentagram map.",
                                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="coordinates, O_k/E_k and monodromy invariants")
    p.add_argument("polygon")
    p = sub.add_parser("iterate", parents=[common], help="iterate the involutions on the coordinates")
    p.add_argument("polygon")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--map", choices=("alternate", "alpha1", "alpha2"), default="alternate")
    p.add_argument("--svg", default=None, help="directory for one SVG snapshot per step")
    p = sub.add_parser("collapse", parents=[common], help="rectilinear collapse experiment")
    p.add_argument("--N", type=int, required=True)
    p = sub.add_parser("condense", parents=[common], help="determinant by condensation")
    p.add_argument("matrix")
    p.add_argument("--retry", action="store_true", help="on a zero interior minor, retry with determinant-preserving transforms")
    p = sub.add_parser("vanishing", parents=[common], help="lambda_v margins for odd n up to K")
    p.add_argument("--n-max", type=int, required=True)
    p = sub.add_parser("independence", parents=[common], help="exact Jacobian rank")
    p.add_argument("--n", type=int, required=True)
    p = sub.add_parser("reconstruct", parents=[common], help="polygons from an invariant file")
    p.add_argument("invariants")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("output",)}
    try:
        result = COMMANDS[args.command](args)
        code = EXIT_OK if result.get("pass", True) else EXIT_CHECK
        report = {"config": config, "result": result}
    except Failure as exc:
        code = exc.code
        report = {"config": config, "error": str(exc), **exc.detail}
    except fio.ParseError as exc:
        code = EXIT_PARSE
        report = {"config": config, "error": str(exc)}
    except (DegenerateQuadruple, NotCollinear, CoincidentArguments, dy.DegenerateConstruction) as exc:
        code = EXIT_DEGENERATE
        report = {"config": config, "error": str(exc)}
    except dy.MapSingularity as exc:
        code = EXIT_SINGULAR
        report = {"config": config, "error": str(exc), "step": exc.step}
    report["exit_code"] = code
    _emit(fio.dumps(report), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
