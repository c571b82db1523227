"""Odd/even admissible subsets and the polynomial invariants O_k, E_k.

Coordinates are stored as a flat sequence ``x`` of length 2n; the
mathematical index j (1-based, cyclic mod 2n) lives at ``x[(j - 1) % 2n]``.

A unit sits on one of the n "positions" of its parity.  For the odd
parity position i carries the singleton 2i+1; a triple starting at
position i is {2i+1, 2i+2, 2i+3} and covers positions i and i+1.  The
even parity is the same picture shifted by one index.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

from .projective import PentalabError, scalar

ODD, EVEN = "odd", "even"


class UnsupportedWeight(PentalabError, ValueError):
    pass


class NotSingletonOnly(PentalabError, ValueError):
    pass


def coords(v: Sequence) -> Tuple[Fraction, ...]:
    """Validate a coordinate vector and return it as a tuple of Fractions."""
    x = tuple(scalar(a) if not isinstance(a, Fraction) else a for a in v)
    if len(x) % 2 or len(x) < 6:
        raise ValueError(f"coordinate vector needs even length >= 6, got {len(x)}")
    return x


def _offset(parity: str) -> int:
    if parity == ODD:
        return 1
    if parity == EVEN:
        return 2
    raise ValueError(f"parity must be 'odd' or 'even', not {parity!r}")


@dataclass(frozen=True)
class Unit:
    start: int  # position 0..n-1
    is_triple: bool

    def positions(self, n: int) -> Tuple[int, ...]:
        if self.is_triple:
            return (self.start, (self.start + 1) % n)
        return (self.start,)

    def indices(self, n: int, parity: str) -> Tuple[int, ...]:
        first = 2 * self.start + _offset(parity)
        span = 3 if self.is_triple else 1
        return tuple((first + t - 1) % (2 * n) + 1 for t in range(span))


@dataclass(frozen=True)
class AdmissibleSubset:
    n: int
    parity: str
    units: Tuple[Unit, ...] = ()
    full: bool = False

    @property
    def weight(self) -> int:
        return self.n if self.full else len(self.units)

    @property
    def sign(self) -> int:
        if self.full:
            return 1
        singles = sum(1 for u in self.units if not u.is_triple)
        return -1 if singles % 2 else 1

    @property
    def indices(self) -> Tuple[int, ...]:
        if self.full:
            off = _offset(self.parity)
            return tuple(range(off, 2 * self.n + 1, 2))
        return tuple(sorted(j for u in self.units for j in u.indices(self.n, self.parity)))

    def monomial(self, x: Sequence) -> Fraction:
        m = len(x)
        out = Fraction(self.sign)
        for j in self.indices:
            out *= x[(j - 1) % m]
        return out


def weight_range(n: int) -> List[int]:
    return list(range(0, n // 2 + 1)) + [n]


def _check_weight(n: int, k: int) -> None:
    if n < 3:
        raise ValueError("n must be at least 3")
    if k not in weight_range(n):
        raise UnsupportedWeight(f"weight {k} not in 0..{n // 2} or {n} for n={n}")


def units_admissible(n: int, units: Iterable[Unit]) -> bool:
    """Disjoint footprints and no two units on neighbouring positions."""
    owner = {}
    for idx, u in enumerate(units):
        for p in u.positions(n):
            if p in owner:
                return False
            owner[p] = idx
    for p, idx in owner.items():
        for q in ((p + 1) % n, (p - 1) % n):
            if owner.get(q, idx) != idx:
                return False
    return True


@lru_cache(maxsize=None)
def enumerate_admissible(n: int, k: int, parity: str = ODD) -> Tuple[AdmissibleSubset, ...]:
    """All weight-k admissible subsets, by backtracking around the cycle."""
    _offset(parity)
    _check_weight(n, k)
    if k == 0:
        return (AdmissibleSubset(n, parity),)
    if k == n:
        return (AdmissibleSubset(n, parity, full=True),)

    owner = [None] * n
    chosen: List[Unit] = []
    found: List[AdmissibleSubset] = []

    def fits(cells, tag):
        for p in cells:
            if owner[p] is not None:
                return False
        for p in cells:
            for q in ((p + 1) % n, (p - 1) % n):
                if owner[q] is not None and owner[q] != tag:
                    return False
        return True

    def place(i, left):
        if left == 0:
            found.append(AdmissibleSubset(n, parity, tuple(chosen)))
            return
        if i >= n or n - i < left:
            return
        place(i + 1, left)
        for is_triple in (False, True):
            unit = Unit(i, is_triple)
            cells = unit.positions(n)
            if len(set(cells)) != len(cells) or not fits(cells, len(chosen)):
                continue
            for p in cells:
                owner[p] = len(chosen)
            chosen.append(unit)
            place(i + 1 + is_triple, left - 1)
            chosen.pop()
            for p in cells:
                owner[p] = None

    place(0, k)
    return tuple(found)


@lru_cache(maxsize=None)
def _monomials(n: int, k: int, parity: str):
    return tuple((s.sign, tuple(j - 1 for j in s.indices))
                 for s in enumerate_admissible(n, k, parity))


def weight_polynomial(x: Sequence, parity: str, kmax: int) -> List[Fraction]:
    """Coefficients of t^0..t^kmax in the signed weight generating function.

    Transfer matrix around the cycle of positions with states empty,
    singleton, triple head and triple tail; the trace counts each cyclic
    configuration once.
    """
    n = len(x) // 2
    m = 2 * n
    off = _offset(parity)
    EMPTY, SINGLE, HEAD, TAIL = range(4)
    follows = {EMPTY: (EMPTY, SINGLE, HEAD), SINGLE: (EMPTY,), HEAD: (TAIL,), TAIL: (EMPTY,)}

    def site(i):
        j = 2 * i + off - 1
        return {EMPTY: (0, Fraction(1)), SINGLE: (1, -x[j % m]),
                HEAD: (1, x[j % m] * x[(j + 1) % m] * x[(j + 2) % m]), TAIL: (0, Fraction(1))}

    sites = [site(i) for i in range(n)]
    total = [Fraction(0)] * (kmax + 1)
    for start in range(4):
        deg, w = sites[0][start]
        vec = {start: [Fraction(0)] * (kmax + 1)}
        if deg <= kmax:
            vec[start][deg] = w
        for i in range(1, n + 1):
            nxt = {}
            for prev, poly in vec.items():
                for cur in follows[prev]:
                    if i == n:
                        if cur != start:
                            continue
                        d, wt = 0, Fraction(1)
                    else:
                        d, wt = sites[i][cur]
                    acc = nxt.setdefault(cur, [Fraction(0)] * (kmax + 1))
                    for e in range(kmax + 1 - d):
                        if poly[e]:
                            acc[e + d] += poly[e] * wt
            vec = nxt
        for e, c in enumerate(vec.get(start, ())):
            total[e] += c
    return total


def _full(x: Sequence, parity: str) -> Fraction:
    out = Fraction(1)
    for j in range(_offset(parity) - 1, len(x), 2):
        out *= x[j]
    return out


def _evaluate(x: Sequence, k: int, parity: str) -> Fraction:
    if k == len(x) // 2:
        return _full(x, parity)
    return weight_polynomial(x, parity, k)[k]


def evaluate_by_enumeration(x: Sequence, k: int, parity: str) -> Fraction:
    """Sum over the explicit list of admissible subsets (reference path)."""
    n = len(x) // 2
    total = Fraction(0)
    for sign, idx in _monomials(n, k, parity):
        term = Fraction(sign)
        for i in idx:
            term *= x[i]
        total += term
    return total


def eval_O(v: Sequence, k: int) -> Fraction:
    x = coords(v)
    _check_weight(len(x) // 2, k)
    return _evaluate(x, k, ODD)


def eval_E(v: Sequence, k: int) -> Fraction:
    x = coords(v)
    _check_weight(len(x) // 2, k)
    return _evaluate(x, k, EVEN)


def evaluate(v: Sequence, k: int, parity: str) -> Fraction:
    return eval_O(v, k) if parity == ODD else eval_E(v, k)


def invariant_tuple(v: Sequence) -> Tuple[Fraction, ...]:
    """(O_1..O_h, E_1..E_h, O_n, E_n) with h = n // 2."""
    x = coords(v)
    n = len(x) // 2
    h = n // 2
    odd, even = weight_polynomial(x, ODD, h), weight_polynomial(x, EVEN, h)
    return tuple(odd[1:]) + tuple(even[1:]) + (_full(x, ODD), _full(x, EVEN))


def swap_blocks(t: Sequence) -> Tuple:
    """Exchange the O and E halves of an invariant tuple."""
    h = (len(t) - 2) // 2
    return tuple(t[h:2 * h]) + tuple(t[:h]) + (t[-1], t[-2])


def invariant_sums(v: Sequence) -> Tuple[Fraction, Fraction]:
    """(sum_{k=0}^{n//2} O_k, same for E)."""
    x = coords(v)
    n = len(x) // 2
    return (sum(weight_polynomial(x, ODD, n // 2), Fraction(0)),
            sum(weight_polynomial(x, EVEN, n // 2), Fraction(0)))


def mod4_products(v: Sequence) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    x = coords(v)
    if len(x) % 4:
        raise ValueError("mod 4 products need 2n divisible by 4")
    f = [Fraction(1)] * 4
    for i, xi in enumerate(x, start=1):
        f[(i - 1) % 4] *= xi
    return tuple(f)


def partial_derivative(v: Sequence, k: int, parity: str, j: int) -> Fraction:
    """Exact d/dx_j of O_k (or E_k); the invariants are multilinear."""
    x = list(coords(v))
    n = len(x) // 2
    _check_weight(n, k)
    base = _evaluate(x, k, parity)
    x[(j - 1) % (2 * n)] += 1
    return _evaluate(x, k, parity) - base


def gradient(v: Sequence, k: int, parity: str) -> Tuple[Fraction, ...]:
    x = coords(v)
    return tuple(partial_derivative(x, k, parity, j) for j in range(1, len(x) + 1))


def scale_action(v: Sequence, t) -> Tuple[Fraction, ...]:
    """S_t: odd coordinates divided by t, even coordinates multiplied by t."""
    t = scalar(t)
    return tuple(a / t if i % 2 == 0 else a * t for i, a in enumerate(coords(v)))


# -- partner sums and tight blocks -------------------------------------------

def _singleton_units(n: int, indices: Iterable[int], parity: str) -> List[Unit]:
    off = _offset(parity)
    units = []
    for j in indices:
        j = (j - 1) % (2 * n) + 1
        if (j - off) % 2:
            raise ValueError(f"index {j} has the wrong parity for {parity}")
        units.append(Unit((j - off) // 2, False))
    return units


def _partner_sum(v: Sequence, singles: Iterable[int], parity: str) -> Fraction:
    x = coords(v)
    n = len(x) // 2
    base = _singleton_units(n, singles, parity)
    if not units_admissible(n, base):
        raise ValueError("singleton set is not admissible")
    total = Fraction(0)
    for mask in range(1 << len(base)):
        units = []
        for b, u in enumerate(base):
            if mask >> b & 1:
                # odd: {j} pairs with {j-2, j-1, j}; even: {j} pairs with {j, j+1, j+2}
                start = (u.start - 1) % n if parity == ODD else u.start
                units.append(Unit(start, True))
            else:
                units.append(u)
        if units_admissible(n, units):
            total += AdmissibleSubset(n, parity, tuple(units)).monomial(x)
    return total


def right_partner_sum(v: Sequence, singles: Iterable[int]) -> Fraction:
    """RO_S: signed sum over odd subsets whose right partner is S."""
    return _partner_sum(v, singles, ODD)


def left_partner_sum(v: Sequence, singles: Iterable[int]) -> Fraction:
    """LE_S: signed sum over even subsets whose left partner is S."""
    return _partner_sum(v, singles, EVEN)


def tight_factorization(S, n: int = None) -> List[Tuple[int, ...]]:
    """Split a singleton-only subset into maximal chains j, j+4, ..., j+4a (mod 2n)."""
    if isinstance(S, AdmissibleSubset):
        if S.full or any(u.is_triple for u in S.units):
            raise NotSingletonOnly("subset contains a triple unit")
        n = S.n
        members = set(S.indices)
    else:
        if n is None:
            raise ValueError("n is required when S is given as indices")
        members = {(j - 1) % (2 * n) + 1 for j in S}
    m = 2 * n
    if 2 * len(members) >= n:
        raise ValueError("tight factorization needs weight < n/2")
    step = lambda j, d: (j - 1 + d) % m + 1
    blocks = []
    for j in sorted(members):
        if step(j, -4) in members:
            continue
        block = [j]
        while step(block[-1], 4) in members:
            block.append(step(block[-1], 4))
        blocks.append(tuple(block))
    return blocks
