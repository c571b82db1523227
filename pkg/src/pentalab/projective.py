"""Exact projective-plane primitives over the rationals.

Points and lines are plain 3-tuples of ``Fraction``.  They are never
normalized on construction; two triples describe the same projective
object when their cross product vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Tuple

Scalar = Fraction
Triple = Tuple[Fraction, Fraction, Fraction]


class PentalabError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateQuadruple(PentalabError, ZeroDivisionError):
    pass


class NotCollinear(PentalabError, ValueError):
    pass


class CoincidentArguments(PentalabError, ValueError):
    pass


class DegeneratePosition(PentalabError, ValueError):
    pass


class SingularMap(PentalabError, ZeroDivisionError):
    pass


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a canonical Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact scalar")


def triple(a, b=None, c=None) -> Triple:
    if b is None and c is None:
        a, b, c = a
    t = (scalar(a), scalar(b), scalar(c))
    if not any(t):
        raise ValueError("homogeneous triple must be nonzero")
    return t


def cross(u: Sequence, v: Sequence) -> Triple:
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def det3(a: Sequence, b: Sequence, c: Sequence):
    return dot(cross(a, b), c)


def is_zero(v: Iterable) -> bool:
    return not any(v)


def same_point(u: Sequence, v: Sequence) -> bool:
    return is_zero(cross(u, v))


def primitive(v: Sequence) -> Triple:
    """Rescale to the primitive integer triple (first nonzero entry positive).

    Used to stop representatives from growing during long iterations.
    """
    den = 1
    for c in v:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in v]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    lead = next(c for c in ints if c)
    if lead < 0:
        g = -g
    return tuple(Fraction(c // g) for c in ints)


def cross_ratio(a, b, c, d) -> Fraction:
    """Cross ratio ((a-c)(b-d)) / ((a-b)(c-d)) of four scalars."""
    a, b, c, d = map(scalar, (a, b, c, d))
    den = (a - b) * (c - d)
    if den == 0:
        raise DegenerateQuadruple("(a-b)(c-d) vanishes")
    return (a - c) * (b - d) / den


def collinear(points: Sequence[Sequence]) -> bool:
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for k in range(j + 1, len(pts)):
                if det3(pts[i], pts[j], pts[k]) != 0:
                    return False
    return True


def cross_ratio_collinear(w1, w2, w3, w4) -> Fraction:
    """Cross ratio of four collinear homogeneous points.

    Agrees with ``cross_ratio`` on affine points of a parametrized line:
    the value is the common coordinate of (w1 x w3)(w2 x w4) / ((w1 x w2)(w3 x w4)).
    """
    w = [triple(p) for p in (w1, w2, w3, w4)]
    if not collinear(w):
        raise NotCollinear("points do not lie on a common line")
    for i in range(4):
        for j in range(i + 1, 4):
            if same_point(w[i], w[j]):
                raise DegenerateQuadruple(f"points {i + 1} and {j + 1} coincide")
    num1, num2 = cross(w[0], w[2]), cross(w[1], w[3])
    den1, den2 = cross(w[0], w[1]), cross(w[2], w[3])
    for i in range(3):
        den = den1[i] * den2[i]
        if den != 0:
            return num1[i] * num2[i] / den
    raise DegenerateQuadruple("no coordinate with nonzero denominator")


def join(p, q) -> Triple:
    """Line through two distinct points."""
    line = cross(p, q)
    if is_zero(line):
        raise CoincidentArguments("join of coincident points")
    return line


def meet(l, m) -> Triple:
    """Intersection point of two distinct lines."""
    point = cross(l, m)
    if is_zero(point):
        raise CoincidentArguments("meet of coincident lines")
    return point


@dataclass(frozen=True)
class ProjMap:
    """A 3x3 matrix acting on points by M v and on lines by the dual map."""

    rows: Tuple[Triple, Triple, Triple]

    def __post_init__(self):
        rows = tuple(tuple(scalar(x) for x in r) for r in self.rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("ProjMap needs a 3x3 matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls) -> "ProjMap":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def from_columns(cls, c1, c2, c3) -> "ProjMap":
        return cls(tuple((c1[i], c2[i], c3[i]) for i in range(3)))

    def columns(self):
        return tuple(tuple(r[j] for r in self.rows) for j in range(3))

    def __call__(self, v) -> Triple:
        return tuple(dot(r, v) for r in self.rows)

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        cols = other.columns()
        return ProjMap(tuple(tuple(dot(r, c) for c in cols) for r in self.rows))

    def scaled(self, s) -> "ProjMap":
        s = scalar(s)
        return ProjMap(tuple(tuple(s * x for x in r) for r in self.rows))

    def det(self) -> Fraction:
        return det3(*self.rows)

    def trace(self) -> Fraction:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def transpose(self) -> "ProjMap":
        return ProjMap(self.columns())

    def adjugate(self) -> "ProjMap":
        r0, r1, r2 = self.rows
        # columns of the adjugate are cross products of rows
        return ProjMap.from_columns(cross(r1, r2), cross(r2, r0), cross(r0, r1))

    def inverse(self) -> "ProjMap":
        d = self.det()
        if d == 0:
            raise SingularMap("matrix is singular")
        return self.adjugate().scaled(1 / d)

    def dual(self) -> "ProjMap":
        """Inverse transpose: the action on lines."""
        return self.inverse().transpose()

    def dual_projective(self) -> "ProjMap":
        """Adjugate transpose, equal to the dual up to scale (no division)."""
        return self.adjugate().transpose()

    def apply_line(self, line) -> Triple:
        return self.dual_projective()(line)

    def is_scalar(self) -> bool:
        r = self.rows
        off = [r[i][j] for i in range(3) for j in range(3) if i != j]
        return not any(off) and r[0][0] == r[1][1] == r[2][2] != 0

    def projectively_equal(self, other: "ProjMap") -> bool:
        a = [x for r in self.rows for x in r]
        b = [x for r in other.rows for x in r]
        k = next((i for i in range(9) if a[i] != 0), None)
        if k is None or b[k] == 0:
            return False
        return all(a[i] * b[k] == b[i] * a[k] for i in range(9))


def _frame(points) -> ProjMap:
    """Matrix sending the standard frame e1, e2, e3, (1,1,1) to the given points."""
    a, b, c, d = (triple(p) for p in points)
    base = ProjMap.from_columns(a, b, c)
    if base.det() == 0:
        raise DegeneratePosition("first three points are collinear")
    lam = base.inverse()(d)
    if any(x == 0 for x in lam):
        raise DegeneratePosition("fourth point lies on a line through two others")
    return ProjMap.from_columns(*(tuple(lam[j] * col[i] for i in range(3))
                                  for j, col in enumerate((a, b, c))))


def map_from_correspondence(src, dst) -> ProjMap:
    """Projective map with src[i] -> dst[i] for four points in general position."""
    if len(src) != 4 or len(dst) != 4:
        raise ValueError("need exactly four source and four target points")
    return _frame(dst) @ _frame(src).inverse()


def omega_invariants(T: ProjMap) -> Tuple[Fraction, Fraction]:
    """(tr^3/det of T, same for the inverse transpose); independent of scale."""
    d = T.det()
    if d == 0:
        raise SingularMap("monodromy lift is singular")
    star = T.dual()
    return T.trace() ** 3 / d, star.trace() ** 3 / star.det()
