"""JSON formats: rationals travel as "p/q" strings so nothing is rounded."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from .dynamics import LINES, POINTS, TwistedPolygon
from .projective import PentalabError, ProjMap


class ParseError(PentalabError, ValueError):
    pass


def fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(s: Any) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ParseError(f"expected a rational string or integer, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}") from None


def _rows(data, rows: int, cols: int, what: str) -> List[List[Fraction]]:
    if not isinstance(data, list) or (rows is not None and len(data) != rows):
        raise ParseError(f"{what}: expected {rows} rows")
    out = []
    for row in data:
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"{what}: every row needs {cols} entries")
        out.append([parse_rational(v) for v in row])
    return out


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def polygon_from_dict(d: Dict[str, Any]) -> TwistedPolygon:
    if not isinstance(d, dict):
        raise ParseError("polygon file must hold a JSON object")
    try:
        n, kind, parity = d["n"], d["kind"], d["parity"]
        reps = d["reps"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    if not isinstance(n, int) or n < 3:
        raise ParseError("n must be an integer >= 3")
    if kind not in (POINTS, LINES):
        raise ParseError("kind must be 'points' or 'lines'")
    if parity not in (1, 3):
        raise ParseError("parity must be 1 or 3")
    rows = _rows(reps, n, 3, "reps")
    mono = ProjMap.identity()
    if d.get("monodromy") is not None:
        mono = ProjMap(tuple(tuple(r) for r in _rows(d["monodromy"], 3, 3, "monodromy")))
    try:
        return TwistedPolygon(kind, parity, tuple(tuple(r) for r in rows), mono)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc)) from None


def polygon_to_dict(P: TwistedPolygon) -> Dict[str, Any]:
    d = {"n": P.n, "kind": P.kind, "parity": P.parity_class,
         "reps": [[fmt(c) for c in r] for r in P.reps]}
    if P.monodromy != ProjMap.identity():
        d["monodromy"] = [[fmt(c) for c in r] for r in P.monodromy.rows]
    return d


def load_polygon(path: str) -> TwistedPolygon:
    return polygon_from_dict(load_json(path))


def coords_from_dict(d: Any) -> List[Fraction]:
    """Invariant file: {"x": ["p/q", ...]} with an even number >= 6 of entries."""
    if not isinstance(d, dict) or not isinstance(d.get("x"), list):
        raise ParseError('invariant file needs a list field "x"')
    x = [parse_rational(v) for v in d["x"]]
    if len(x) % 2 or len(x) < 6:
        raise ParseError("x needs an even number (at least 6) of entries")
    return x


def matrix_from_json(d: Any) -> List[List[Fraction]]:
    """Square matrix as a bare list of rows or {"matrix": rows}."""
    rows = d.get("matrix") if isinstance(d, dict) else d
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix must be a nonempty list of rows")
    return _rows(rows, len(rows), len(rows), "matrix")


def matrix_to_json(M: Sequence[Sequence]) -> Dict[str, Any]:
    return {"matrix": [[fmt(v) for v in row] for row in M]}
