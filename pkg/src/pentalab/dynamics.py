"""The pentagram involutions in coordinates and on twisted polygons.

Labels follow the usual convention: a polygon of parity class c holds
points (or lines) at labels c, c+4, c+8, ...; representative r of the
stored period sits at label c + 4r.  Its two invariants land in the
coordinate vector at indices (c + 4r + 1)/2 ("p") and (c + 4r - 1)/2 ("q").
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import projective as pj
from .invariants import coords, eval_E, eval_O, invariant_sums
from .projective import PentalabError, ProjMap, Triple


class MapSingularity(PentalabError, ZeroDivisionError):
    def __init__(self, message, index=None, step=None):
        super().__init__(message)
        self.index = index
        self.step = step


class DegenerateConstruction(PentalabError, ValueError):
    def __init__(self, message, label=None):
        super().__init__(message)
        self.label = label


def _alpha(v: Sequence, which: int) -> Tuple[Fraction, ...]:
    x = coords(v)
    m = len(x)
    n = m // 2
    X = lambda i: x[(i - 1) % m]

    def ratio(num_pair, den_pair):
        a, b = den_pair
        den = 1 - X(a) * X(b)
        if den == 0:
            raise MapSingularity(f"1 - x_{(a - 1) % m + 1} x_{(b - 1) % m + 1} vanishes",
                                 index=(a - 1) % m + 1)
        c, d = num_pair
        return (1 - X(c) * X(d)) / den

    y = [None] * m
    for k in range(1, n + 1):
        if which == 1:
            y[(2 * k - 2) % m] = X(2 * k) * ratio((2 * k + 1, 2 * k + 2), (2 * k - 3, 2 * k - 2))
            y[(2 * k - 1) % m] = X(2 * k - 1) * ratio((2 * k - 3, 2 * k - 2), (2 * k + 1, 2 * k + 2))
        else:
            y[(2 * k) % m] = X(2 * k) * ratio((2 * k - 2, 2 * k - 1), (2 * k + 2, 2 * k + 3))
            y[(2 * k - 1) % m] = X(2 * k + 1) * ratio((2 * k + 2, 2 * k + 3), (2 * k - 2, 2 * k - 1))
    return tuple(y)


def alpha1(v: Sequence) -> Tuple[Fraction, ...]:
    """First pentagram involution on x_1..x_2n."""
    return _alpha(v, 1)


def alpha2(v: Sequence) -> Tuple[Fraction, ...]:
    """Second pentagram involution on x_1..x_2n."""
    return _alpha(v, 2)


def iterate_coordinates(v: Sequence, steps: int, first: int = 1) -> List[Tuple[Fraction, ...]]:
    """Orbit under alternating involutions, starting with alpha_first."""
    orbit = [coords(v)]
    which = first
    for s in range(steps):
        try:
            orbit.append(_alpha(orbit[-1], which))
        except MapSingularity as exc:
            exc.step = s + 1
            raise
        which = 3 - which
    return orbit


# -- twisted polygons --------------------------------------------------------

POINTS, LINES = "points", "lines"


@dataclass(frozen=True)
class TwistedPolygon:
    """One period of a point or line sequence together with its monodromy.

    ``reps[r]`` is the element at label ``parity_class + 4 r``; the element
    at label ``j + 4n`` is the monodromy applied to the one at ``j``.
    """

    kind: str
    parity_class: int
    reps: Tuple[Triple, ...]
    monodromy: ProjMap = field(default_factory=ProjMap.identity)

    def __post_init__(self):
        if self.kind not in (POINTS, LINES):
            raise ValueError(f"kind must be points or lines, not {self.kind!r}")
        if self.parity_class not in (1, 3):
            raise ValueError("parity class must be 1 or 3")
        reps = tuple(pj.triple(r) for r in self.reps)
        if len(reps) < 3:
            raise ValueError("need at least three representatives")
        object.__setattr__(self, "reps", reps)
        if self.monodromy.det() == 0:
            raise pj.SingularMap("monodromy must be invertible")

    @property
    def n(self) -> int:
        return len(self.reps)

    def _step_map(self, forward: bool) -> ProjMap:
        T = self.monodromy if forward else self.monodromy.adjugate()
        return T if self.kind == POINTS else T.dual_projective()

    def at(self, label: int) -> Triple:
        if (label - self.parity_class) % 4:
            raise KeyError(f"label {label} is not in class {self.parity_class} mod 4")
        turns, r = divmod((label - self.parity_class) // 4, self.n)
        v = self.reps[r]
        if turns:
            M = self._step_map(turns > 0)
            for _ in range(abs(turns)):
                v = M(v)
        return v

    def labels(self) -> List[int]:
        return [self.parity_class + 4 * r for r in range(self.n)]

    def transformed(self, S: ProjMap) -> "TwistedPolygon":
        """Image under a projective map S (monodromy conjugated)."""
        act = S if self.kind == POINTS else S.dual_projective()
        return TwistedPolygon(self.kind, self.parity_class,
                              tuple(act(r) for r in self.reps),
                              S @ self.monodromy @ S.inverse())

    def is_periodic(self) -> bool:
        return self.monodromy.is_scalar()


def closed_polygon(points: Sequence, kind: str = POINTS, parity_class: int = 1) -> TwistedPolygon:
    return TwistedPolygon(kind, parity_class, tuple(pj.triple(p) for p in points))


def _delta(P: TwistedPolygon, offset: int) -> TwistedPolygon:
    cls = (P.parity_class + (2 if offset == 2 else 0) - 1) % 4 + 1
    reps = []
    for lab in (cls + 4 * r for r in range(P.n)):
        v = pj.cross(P.at(lab - offset), P.at(lab + offset))
        if pj.is_zero(v):
            raise DegenerateConstruction(f"coincident elements around label {lab}", label=lab)
        reps.append(pj.primitive(v))
    other = LINES if P.kind == POINTS else POINTS
    return TwistedPolygon(other, cls, tuple(reps), P.monodromy)


def delta1(P: TwistedPolygon) -> TwistedPolygon:
    """Associate: element j is joined/met from labels j-2 and j+2 (class flips)."""
    return _delta(P, 2)


def delta2(P: TwistedPolygon) -> TwistedPolygon:
    """Element j is joined/met from labels j-4 and j+4 (class kept)."""
    return _delta(P, 4)


def pentagram_step(P: TwistedPolygon) -> TwistedPolygon:
    """One geometric pentagram step: short diagonals, then their consecutive meets."""
    return delta1(delta2(P))


def _xcr(w1, w2, w3, w4, label) -> Fraction:
    try:
        # the invariant is the reciprocal of the classical value
        return pj.cross_ratio_collinear(w1, w3, w2, w4)
    except (pj.DegenerateQuadruple, pj.NotCollinear, ValueError) as exc:
        raise DegenerateConstruction(f"invariant at label {label}: {exc}", label=label)


def extract_invariants(P: TwistedPolygon) -> Tuple[Fraction, ...]:
    """Flattened p/q invariants x_1..x_2n of a point or line sequence."""
    D = delta1(P)
    m = 2 * P.n
    x = [None] * m
    for j in P.labels():
        p = _xcr(P.at(j + 8), P.at(j + 4),
                 pj.cross(D.at(j + 6), D.at(j - 2)), pj.cross(D.at(j + 6), D.at(j - 6)), j)
        q = _xcr(P.at(j - 8), P.at(j - 4),
                 pj.cross(D.at(j - 6), D.at(j + 2)), pj.cross(D.at(j - 6), D.at(j + 6)), j)
        x[((j + 1) // 2 - 1) % m] = p
        x[((j - 1) // 2 - 1) % m] = q
    return tuple(x)


def coordinate_geometric_agreement(P: TwistedPolygon) -> Dict[str, bool]:
    """Compare geometric delta-composites with the coordinate involutions."""
    x = extract_invariants(P)
    via_d2 = extract_invariants(delta2(P))
    via_d121 = extract_invariants(delta1(delta2(delta1(P))))
    if P.parity_class == 1:
        a_d2, a_d121 = alpha2(x), alpha1(x)
    else:
        a_d2, a_d121 = alpha1(x), alpha2(x)
    return {
        "delta2": via_d2 == a_d2,
        "delta1_delta2_delta1": via_d121 == a_d121,
        "delta1_keeps_coordinates": extract_invariants(delta1(P)) == x,
    }


# -- degeneracy --------------------------------------------------------------

def is_degenerate(P: TwistedPolygon) -> bool:
    """Alternate elements (labels j, j+8, j+16, ...) collinear/concurrent in both classes."""
    if not P.is_periodic():
        raise ValueError("degeneracy is defined for periodic polygons")
    for j in P.labels():
        if pj.det3(P.at(j), P.at(j + 8), P.at(j + 16)) != 0:
            return False
    return True


def degeneracy_coords(v: Sequence, parity_class: int = 1) -> bool:
    """q p = 1 for the two invariants of every element.

    Class 1 stores them at (2i, 2i+1), class 3 at (2i-1, 2i).
    """
    x = coords(v)
    m = len(x)
    shift = 0 if parity_class == 1 else -1
    return all(x[(2 * i + shift - 1) % m] * x[(2 * i + shift) % m] == 1
               for i in range(1, m // 2 + 1))


# -- conics and closed polygons ----------------------------------------------

def conic_map(a, b, c, d) -> ProjMap:
    """Action of t -> (a t + b)/(c t + d) on the conic points (t^2, t, 1)."""
    a, b, c, d = (pj.scalar(v) for v in (a, b, c, d))
    return ProjMap(((a * a, 2 * a * b, b * b),
                    (a * c, a * d + b * c, b * d),
                    (c * c, 2 * c * d, d * d)))


def conic_polygon(params: Sequence, S: ProjMap = None, moebius: Sequence = None) -> TwistedPolygon:
    """Polygon with vertices (t^2, t, 1) on a conic, optionally moved by S.

    With ``moebius`` = (a, b, c, d) the polygon is twisted: its monodromy
    moves each parameter by the corresponding fractional linear map, so
    the whole sequence stays on the conic.  Closed quadrilaterals are
    degenerate for the invariants, twisted ones are not.
    """
    pts = [(pj.scalar(t) ** 2, pj.scalar(t), Fraction(1)) for t in params]
    T = ProjMap.identity() if moebius is None else conic_map(*moebius)
    P = TwistedPolygon(POINTS, 1, tuple(pts), T)
    return P.transformed(S) if S is not None else P


def conic_identities(v: Sequence) -> Dict[str, bool]:
    """Check both conic relations for all k and O_n = E_n."""
    x = coords(v)
    m = len(x)
    n = m // 2
    X = lambda i: x[(i - 1) % m]
    first = second = True
    for k in range(1, n + 1):
        p_prev, q, p_next = X(2 * k - 1), X(2 * k), X(2 * k + 1)
        q_prev = X(2 * k - 2)
        if (1 - q) * (1 - q_prev * p_prev) != (1 - p_prev) * (1 - q * p_next):
            first = False
        if (1 - p_prev) * q * (1 - p_next) != (1 - q_prev) * p_prev * (1 - q):
            second = False
    return {"first": first, "second": second, "On_equals_En": eval_O(x, n) == eval_E(x, n)}


def closed_polygon_relation(v: Sequence) -> Tuple[bool, bool]:
    """(sum O_k)^3 = 27 O_n^2 E_n and the mirrored relation."""
    x = coords(v)
    n = len(x) // 2
    so, se = invariant_sums(x)
    On, En = eval_O(x, n), eval_E(x, n)
    return so ** 3 == 27 * On ** 2 * En, se ** 3 == 27 * En ** 2 * On
