"""Rebuild point/line sequences from periodic invariants and lift the monodromy.

The variables p_1, q_2, p_3, ... are read cyclically from a coordinate
vector: variable j is ``x[(j - 1) % 2n]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from . import projective as pj
from .dynamics import LINES, POINTS, DegenerateConstruction, TwistedPolygon
from .invariants import coords, eval_E, eval_O, invariant_sums
from .projective import PentalabError, ProjMap, Triple


class WindowExceeded(PentalabError, IndexError):
    pass


class ZeroLeadingInvariant(PentalabError, ZeroDivisionError):
    pass


class TruncatedTable:
    """Truncated sums O_r^s / E_r^s over a finite index window.

    The parity of r decides which family is meant: odd r gives O, even r
    gives E.  Values come from the right recurrence; ``left`` and
    ``brute_force`` are independent routes used for checking.
    """

    def __init__(self, x: Sequence, lo: int = None, hi: int = None):
        self.x = coords(x)
        n = len(self.x) // 2
        self.lo = -8 if lo is None else lo
        self.hi = 4 * n + 16 if hi is None else hi
        self._memo: Dict[Tuple[int, int], Fraction] = {}

    def var(self, j: int) -> Fraction:
        return self.x[(j - 1) % len(self.x)]

    def triple_product(self, j: int) -> Fraction:
        return self.var(j - 1) * self.var(j) * self.var(j + 1)

    def _check(self, r, s):
        if (r - s) % 2:
            raise ValueError("r and s must have the same parity")
        if r < self.lo or s > self.hi:
            raise WindowExceeded(f"({r}, {s}) outside window [{self.lo}, {self.hi}]")

    def __call__(self, r: int, s: int) -> Fraction:
        self._check(r, s)
        return self._right(r, s)

    def _right(self, r, s):
        if r > s:
            return Fraction(0)
        if s - r <= 2:
            return Fraction(1)
        key = (r, s)
        val = self._memo.get(key)
        if val is None:
            # iterate from the top end so deep windows never recurse deeply
            for t in range(s - 4, r - 1, -2):
                if (t, s) not in self._memo:
                    self._memo[(t, s)] = (self._right_base(t + 2, s)
                                          - self.var(t + 2) * self._right_base(t + 4, s)
                                          + self.triple_product(t + 3) * self._right_base(t + 6, s))
            val = self._memo[key]
        return val

    def _right_base(self, r, s):
        if r > s:
            return Fraction(0)
        if s - r <= 2:
            return Fraction(1)
        return self._memo[(r, s)]

    def left(self, r: int, s: int) -> Fraction:
        """Same quantity from the left recurrence (peeling off the top index)."""
        self._check(r, s)
        vals: Dict[int, Fraction] = {}

        def get(t):
            if r > t:
                return Fraction(0)
            if t - r <= 2:
                return Fraction(1)
            return vals[t]

        for t in range(r + 4, s + 1, 2):
            vals[t] = get(t - 2) - self.var(t - 2) * get(t - 4) + self.triple_product(t - 3) * get(t - 6)
        return get(s)

    def brute_force(self, r: int, s: int) -> Fraction:
        """Signed sum over admissible unit sets strictly between r and s."""
        self._check(r, s)
        if r > s:
            return Fraction(0)
        # positions are the same-parity indices r+2, ..., s-2
        slots = list(range(r + 2, s - 1, 2))
        total = Fraction(0)

        def walk(i, term):
            nonlocal total
            if i >= len(slots):
                total += term
                return
            walk(i + 1, term)
            j = slots[i]
            walk(i + 2, -term * self.var(j))
            if i + 1 < len(slots):
                walk(i + 3, term * self.var(j) * self.var(j + 1) * self.var(j + 2))

        walk(0, Fraction(1))
        return total


def polypoint_sequence(x: Sequence, count: int) -> Dict[int, Triple]:
    """Points A_{-3}, A_1, ..., A_{4(count-1)+1} from the invariants."""
    tab = TruncatedTable(x, hi=max(2 * count + 8, 4 * (len(x) // 2) + 16))
    p1 = tab.var(1)
    pts = {-3: (Fraction(0), Fraction(1), Fraction(0))}
    for j in range(count):
        s = 2 * j - 1
        o1, om1, o3 = tab(1, s), tab(-1, s), tab(3, s)
        pts[4 * j + 1] = (o1, om1 + p1 * o3, om1)
    return pts


def polyline_sequence(x: Sequence, count: int) -> Dict[int, Triple]:
    """Lines B_{-5}, B_{-1}, B_3, ... from the invariants."""
    tab = TruncatedTable(x, hi=max(2 * count + 8, 4 * (len(x) // 2) + 16))
    p1q2 = tab.var(1) * tab.var(2)
    lines = {-5: (Fraction(0), Fraction(0), Fraction(1)), -1: (Fraction(1), Fraction(0), Fraction(0))}
    for j in range(count):
        s = 2 * j
        e0, e2, e4 = tab(0, s), tab(2, s), tab(4, s)
        lines[4 * j + 3] = (-e2 + p1q2 * e4, e0, -e0 + e2)
    return lines


def _from_sequence(seq: Dict[int, Triple], n: int, kind: str, cls: int) -> TwistedPolygon:
    first = cls
    src_labels = [first - 4, first, first + 4, first + 8]
    src = [seq[j] for j in src_labels]
    dst = [seq[j + 4 * n] for j in src_labels]
    try:
        T = pj.map_from_correspondence(src, dst)
    except pj.DegeneratePosition as exc:
        raise DegenerateConstruction(f"monodromy frame is degenerate: {exc}")
    if kind == LINES:
        # lines transform by the dual; recover the point map from it
        T = T.transpose().adjugate()
    reps = tuple(seq[first + 4 * r] for r in range(n))
    for lab, v in seq.items():
        if pj.is_zero(v):
            raise DegenerateConstruction(f"zero vector at label {lab}", label=lab)
    return TwistedPolygon(kind, cls, reps, T)


def build_polypoint(x: Sequence) -> TwistedPolygon:
    """Twisted polygon of class 1 whose invariants are x."""
    x = coords(x)
    n = len(x) // 2
    return _from_sequence(polypoint_sequence(x, n + 4), n, POINTS, 1)


def build_polyline(x: Sequence) -> TwistedPolygon:
    """The associated line sequence B_3, B_7, ... (class 3)."""
    x = coords(x)
    n = len(x) // 2
    return _from_sequence(polyline_sequence(x, n + 4), n, LINES, 3)


def _prod(vals) -> Fraction:
    out = Fraction(1)
    for v in vals:
        out *= v
    return out


def verify_incidence_identities(x: Sequence, k_max: int = 4, d_max: int = 2) -> List[str]:
    """Check the dot/cross identities between A and B; returns failure messages."""
    x = coords(x)
    count = k_max + d_max + 6
    A = polypoint_sequence(x, count)
    B = polyline_sequence(x, count)
    tab = TruncatedTable(x, hi=4 * count + 16)
    v = tab.var
    failures = []

    def expect(name, lhs, rhs):
        if lhs != rhs:
            failures.append(f"{name}: {lhs} != {rhs}")

    for k in range(2, k_max + 1):
        pq = _prod(v(i) for i in range(1, 2 * k + 1))  # p1 q2 ... q_2k
        for d in range(0, d_max + 1):
            expect(f"A{4*k+1}.B{4*k+3+4*d}", pj.dot(A[4 * k + 1], B[4 * k + 3 + 4 * d]),
                   pq * tab(2 * k + 2, 2 * k + 2 * d))
            expect(f"B{4*k+3}.A{4*k+5+4*d}", pj.dot(B[4 * k + 3], A[4 * k + 5 + 4 * d]),
                   pq * v(2 * k + 1) * tab(2 * k + 3, 2 * k + 1 + 2 * d))
        podd = _prod(v(i) for i in range(1, 2 * k, 2))
        qeven = _prod(v(i) for i in range(2, 2 * k + 1, 2))
        expect(f"A{4*k+1}xA{4*k+5}", pj.cross(A[4 * k + 1], A[4 * k + 5]),
               tuple(podd * c for c in B[4 * k + 3]))
        expect(f"B{4*k+3}xB{4*k+7}", pj.cross(B[4 * k + 3], B[4 * k + 7]),
               tuple(qeven * c for c in A[4 * k + 5]))
        expect(f"A{4*k+1}.B{4*k+7}", pj.dot(A[4 * k + 1], B[4 * k + 7]), pq)
        expect(f"B{4*k+3}.A{4*k+9}", pj.dot(B[4 * k + 3], A[4 * k + 9]), pq * v(2 * k + 1))
        expect(f"A{4*k+1}.B{4*k+11}", pj.dot(A[4 * k + 1], B[4 * k + 11]), pq)
        expect(f"B{4*k+3}.A{4*k+13}", pj.dot(B[4 * k + 3], A[4 * k + 13]), pq * v(2 * k + 1))
    return failures


@dataclass(frozen=True)
class MonodromyLift:
    V1: Triple
    V2: Triple
    V3: Triple

    def matrix(self) -> ProjMap:
        return ProjMap.from_columns(self.V1, self.V2, self.V3)


def monodromy_lift(x: Sequence) -> MonodromyLift:
    """Explicit lift of the monodromy built from A_{4n-3}, A_{4n+1}, A_{4n+5}."""
    x = coords(x)
    n = len(x) // 2
    A = polypoint_sequence(x, n + 3)
    var = lambda j: x[(j - 1) % (2 * n)]
    c = var(2 * n - 1) * var(2 * n) * var(2 * n + 1)
    V1 = tuple(var(1) * a - var(2 * n + 1) * b for a, b in zip(A[4 * n + 5], A[4 * n + 1]))
    V2 = tuple(c * a for a in A[4 * n - 3])
    V3 = tuple(var(2 * n + 1) * a - c * b for a, b in zip(A[4 * n + 1], A[4 * n - 3]))
    lift = MonodromyLift(V1, V2, V3)
    if lift.matrix().det() == 0:
        raise pj.SingularMap("monodromy lift is singular")
    return lift


def geometric_monodromy(x: Sequence) -> ProjMap:
    """Monodromy recovered from four points and their images one period later."""
    x = coords(x)
    n = len(x) // 2
    A = polypoint_sequence(x, n + 4)
    labels = (-3, 1, 5, 9)
    return pj.map_from_correspondence([A[j] for j in labels], [A[j + 4 * n] for j in labels])


def lift_trace_det_closed_forms(x: Sequence) -> Tuple[Fraction, Fraction]:
    """(p_1 * sum O_k, p_1^3 (p_1 p_3 ... p_{2n-1})^2 (q_2 ... q_{2n}))."""
    x = coords(x)
    so, _ = invariant_sums(x)
    podd = _prod(x[0::2])
    qeven = _prod(x[1::2])
    return x[0] * so, x[0] ** 3 * podd ** 2 * qeven


def omega_from_invariants(x: Sequence) -> Tuple[Fraction, Fraction]:
    """Omega_1, Omega_2 as rational functions of the pentagram invariants."""
    x = coords(x)
    n = len(x) // 2
    On, En = eval_O(x, n), eval_E(x, n)
    if On == 0 or En == 0:
        raise ZeroLeadingInvariant("O_n or E_n vanishes")
    so, se = invariant_sums(x)
    return so ** 3 / (On ** 2 * En), se ** 3 / (En ** 2 * On)


def dual_coordinates(x: Sequence) -> Tuple[Fraction, ...]:
    """Coordinates with the p and q letters exchanged (cyclic shift by one)."""
    x = coords(x)
    return x[1:] + x[:1]
