"""Root-of-unity sums lambda_v and the Jacobian rank behind algebraic independence.

Index sequences for lambda_v are strictly increasing v-tuples from
{2, ..., n-2}.  Under the default "gap" reading consecutive entries differ
by at least 2; the "literal" reading keeps every such tuple.  Compression
sends (s_1, ..., s_v) to the multiset t_j = s_j + v + 1 - 2j, which lands on
the arc A_v = [v+1, n-v-1] and preserves the exponent sum.
"""
from __future__ import annotations

import cmath
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .invariants import (EVEN, ODD, _check_weight, enumerate_admissible, partial_derivative,
                         scale_action, weight_polynomial, _full)
from .projective import PentalabError

GAP, LITERAL = "gap", "literal"
TOL = 1e-9


class OutOfRange(PentalabError, ValueError):
    pass


def _check(n: int, v: int) -> None:
    if n < 5 or n % 2 == 0:
        raise OutOfRange(f"n must be odd and at least 5, got {n}")
    if not 1 <= v <= (n - 3) // 2:
        raise OutOfRange(f"v must lie in [1, {(n - 3) // 2}] for n={n}, got {v}")


def omega(n: int) -> complex:
    return cmath.exp(2j * math.pi / n)


# -- adapted measures ----------------------------------------------------------

@dataclass(frozen=True)
class AdaptedMeasure:
    """Integer atoms on the n-th roots of unity, stored as sorted residues."""

    n: int
    atoms: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(sorted(a % self.n for a in self.atoms)))

    @property
    def mass(self) -> int:
        return len(self.atoms)

    def multiplicities(self) -> Dict[int, int]:
        return dict(Counter(self.atoms))

    @property
    def sparse(self) -> bool:
        return len(set(self.atoms)) == len(self.atoms)

    def __mul__(self, other: "AdaptedMeasure") -> "AdaptedMeasure":
        if other.n != self.n:
            raise ValueError("measures live on different roots of unity")
        return AdaptedMeasure(self.n, self.atoms + other.atoms)

    def evaluate(self) -> complex:
        return omega(self.n) ** (sum(self.atoms) % self.n)


@dataclass(frozen=True)
class MeasureSum:
    """Formal integer combination of adapted measures."""

    n: int
    terms: Tuple[Tuple[AdaptedMeasure, int], ...] = ()

    @classmethod
    def of(cls, n: int, items: Iterable[Tuple[AdaptedMeasure, int]]) -> "MeasureSum":
        acc: Counter = Counter()
        for mu, c in items:
            acc[mu] += c
        return cls(n, tuple(sorted(((mu, c) for mu, c in acc.items() if c),
                                   key=lambda t: t[0].atoms)))

    @classmethod
    def single(cls, mu: AdaptedMeasure, coeff: int = 1) -> "MeasureSum":
        return cls.of(mu.n, [(mu, coeff)])

    def __add__(self, other: "MeasureSum") -> "MeasureSum":
        return MeasureSum.of(self.n, self.terms + other.terms)

    def __neg__(self) -> "MeasureSum":
        return MeasureSum(self.n, tuple((mu, -c) for mu, c in self.terms))

    def __mul__(self, other: "MeasureSum") -> "MeasureSum":
        return MeasureSum.of(self.n, [(a * b, ca * cb) for a, ca in self.terms
                                      for b, cb in other.terms])

    def evaluate(self) -> complex:
        return sum((c * mu.evaluate() for mu, c in self.terms), 0j)


def homogeneous_sum(n: int, residues: Sequence[int], mass: int) -> MeasureSum:
    """Every measure of the given mass supported on ``residues``, coefficient 1."""
    return MeasureSum.of(n, [(AdaptedMeasure(n, c), 1)
                             for c in combinations_with_replacement(sorted(residues), mass)])


def elementary_sum(n: int, residues: Sequence[int], mass: int) -> MeasureSum:
    """Every sparse measure of the given mass supported on ``residues``."""
    return MeasureSum.of(n, [(AdaptedMeasure(n, c), 1)
                             for c in combinations(sorted(residues), mass)])


def full_mass_sum(n: int, mass: int) -> MeasureSum:
    return homogeneous_sum(n, range(n), mass)


# -- direct sums and compression -----------------------------------------------

def index_sequences(n: int, v: int, reading: str = GAP) -> List[Tuple[int, ...]]:
    pool = combinations(range(2, n - 1), v)
    if reading == LITERAL:
        return list(pool)
    if reading != GAP:
        raise ValueError(f"reading must be {GAP!r} or {LITERAL!r}")
    return [s for s in pool if all(b >= a + 2 for a, b in zip(s, s[1:]))]


def lambda_direct(n: int, v: int, reading: str = GAP) -> complex:
    _check(n, v)
    w = omega(n)
    return sum((w ** (sum(s) % n) for s in index_sequences(n, v, reading)), 0j)


def compress(s: Sequence[int], n: int) -> AdaptedMeasure:
    v = len(s)
    return AdaptedMeasure(n, tuple(sj + v + 1 - 2 * j for j, sj in enumerate(s, start=1)))


def compressed_arc(n: int, v: int) -> range:
    return range(v + 1, n - v)


def compression_image(n: int, v: int, reading: str = GAP) -> MeasureSum:
    return MeasureSum.of(n, [(compress(s, n), 1) for s in index_sequences(n, v, reading)])


def compression_matches(n: int, v: int, reading: str = GAP) -> bool:
    """Does compression carry the index sequences one-to-one onto all mass-v measures on A_v?"""
    _check(n, v)
    return compression_image(n, v, reading) == homogeneous_sum(n, compressed_arc(n, v), v)


# -- Case 1: sparse complement -------------------------------------------------

def complement_table(n: int, v: int) -> Dict[Tuple[int, int], float]:
    """P(u, m): value of the sparse mass-m sum on the symmetric arc {-u..u}."""
    table: Dict[Tuple[int, int], float] = {}
    for u in range(v + 1):
        for m in range(v + 1):
            if u == 0:
                table[u, m] = 1.0 if m in (0, 1) else 0.0
                continue
            c = 2 * math.cos(2 * math.pi * u / n)
            table[u, m] = (table[u - 1, m]
                           + (c * table[u - 1, m - 1] if m >= 1 else 0.0)
                           + (table[u - 1, m - 2] if m >= 2 else 0.0))
    return table


def lambda_case1(n: int, v: int) -> float:
    return (-1) ** v * complement_table(n, v)[v, v]


def case1_positive(n: int, v: int) -> bool:
    t = complement_table(n, v)
    return all(t[u, m] > TOL for u in range(v + 1) for m in range(min(2 * u + 1, v) + 1))


# -- Case 2: conjugate pairs ---------------------------------------------------

def conjugate_pairs(n: int) -> List[Tuple[int, int]]:
    """Residue pairs ordered outward from -1; the first w/2 pairs form the arc B_w."""
    return [((n - 1) // 2 - r, (n + 1) // 2 + r) for r in range((n - 1) // 2)]


@lru_cache(maxsize=None)
def psi(n: int, w: int, kprime: int, k: int) -> complex:
    """Mass-k measures on B_w whose outermost pair carries mass at most k'."""
    if k < 0:
        return 0j
    if k == 0:
        return 1 + 0j
    if w <= 0:
        return 0j
    a, b = conjugate_pairs(n)[w // 2 - 1]
    za, zb = omega(n) ** a, omega(n) ** b
    total = 0j
    for m in range(min(kprime, k) + 1):
        h = sum(za ** i * zb ** (m - i) for i in range(m + 1))
        total += h * psi(n, w - 2, k - m, k - m)
    return total


def lambda_case2(n: int, v: int) -> complex:
    return psi(n, n - 2 * v - 1, v, v)


def case2_sign_failures(n: int, v: int) -> List[Tuple[int, int, int]]:
    """Triples (w, k', k) in the recursion used for lambda_v violating sign (-1)^k.

    w = 2 with k' < k is an empty sum and is skipped.
    """
    bad = []
    for w in range(2, n - 2 * v, 2):
        for k in range(1, v + 1):
            for kp in range(k + 1):
                if w == 2 and kp < k:
                    continue
                val = psi(n, w, kp, k)
                ok = abs(val.imag) < TOL and (val.real > TOL if k % 2 == 0 else val.real < -TOL)
                if not ok:
                    bad.append((w, kp, k))
    return bad


def lambda_via_measures(n: int, v: int, route: Optional[str] = None) -> complex:
    """lambda_v through compression, then the sparse complement or the pair recursion."""
    _check(n, v)
    if route is None:
        route = "case1" if 4 * v < n else "case2"
    if route == "case1":
        return complex(lambda_case1(n, v))
    if route == "case2":
        return lambda_case2(n, v)
    raise ValueError(f"unknown route {route!r}")


def vanishing_check(n: int) -> Dict[str, object]:
    if n < 5 or n % 2 == 0:
        raise OutOfRange(f"n must be odd and at least 5, got {n}")
    rows = []
    for v in range(1, (n - 3) // 2 + 1):
        direct = lambda_direct(n, v)
        case1 = 4 * v < n
        via = lambda_via_measures(n, v)
        signs = case1_positive(n, v) if case1 else not case2_sign_failures(n, v)
        rows.append({
            "n": n, "v": v, "case": 1 if case1 else 2,
            "re": round(direct.real, 12), "im": round(direct.imag, 12) + 0.0,
            "margin": round(abs(direct - v), 12),
            "abs": round(abs(direct), 12),
            "path_delta": abs(direct - via),
            "signs_ok": signs,
        })
    ok = all(r["margin"] > TOL and r["path_delta"] < TOL and r["signs_ok"] for r in rows)
    return {"n": n, "pass": ok, "rows": rows}


# -- gradients at the regular point ----------------------------------------------

def h_gradient(n: int, k: int) -> List[complex]:
    """Gradient of H_k = O_k restricted to the odd coordinates, at z = (w, w^2, ..., w^n)."""
    _check_weight(n, k)
    w = omega(n)
    z = [w ** (i % n) for i in range(1, n + 1)]
    grad = [0j] * n
    for s in enumerate_admissible(n, k, ODD):
        if any(u.is_triple for u in s.units):
            continue
        pos = [(j - 1) // 2 for j in s.indices]
        for p in pos:
            term = complex(s.sign)
            for q in pos:
                if q != p:
                    term *= z[q]
            grad[p] += term
    return grad


def power_vector(n: int, e: int) -> List[complex]:
    w = omega(n)
    return [w ** ((i * e) % n) for i in range(1, n + 1)]


def proportional(a: Sequence[complex], b: Sequence[complex], tol: float = TOL) -> bool:
    """a = mu b for some complex mu (b has no zero entries)."""
    mu = a[-1] / b[-1]
    return all(abs(x - mu * y) < tol for x, y in zip(a, b))


# -- exact Jacobian rank ---------------------------------------------------------

def _rank(rows: List[List[Fraction]]) -> int:
    A = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((r for r in range(rank, len(A)) if A[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, len(A)):
            if A[r][col]:
                f = A[r][col] / A[rank][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
        col += 1
    return rank


def jacobian(x: Sequence[Fraction]) -> List[List[Fraction]]:
    """Rows: gradients of O_1..O_h, E_1..E_h, O_n, E_n (h = n // 2)."""
    x = list(x)
    n = len(x) // 2
    h = n // 2
    base = (weight_polynomial(x, ODD, h), weight_polynomial(x, EVEN, h), _full(x, ODD), _full(x, EVEN))
    cols = []
    for j in range(2 * n):
        y = list(x)
        y[j] += 1
        odd, even = weight_polynomial(y, ODD, h), weight_polynomial(y, EVEN, h)
        cols.append([odd[k] - base[0][k] for k in range(1, h + 1)]
                    + [even[k] - base[1][k] for k in range(1, h + 1)]
                    + [_full(y, ODD) - base[2], _full(y, EVEN) - base[3]])
    return [list(r) for r in zip(*cols)]


def random_rational_point(n: int, rng: random.Random, bound: int = 20) -> List[Fraction]:
    out = []
    for _ in range(2 * n):
        num = 0
        while num == 0:
            num = rng.randint(-bound, bound)
        out.append(Fraction(num, rng.randint(1, bound)))
    return out


def homogeneity_holds(x: Sequence, k: int, parity: str, j: int, t) -> bool:
    """d_j F_k(S_t q) = t^(-k_j) d_j F_k(q), k_j = k + (-1)^j for O and -(k - (-1)^j) for E."""
    t = Fraction(t)
    lhs = partial_derivative(scale_action(x, t), k, parity, j)
    rhs = partial_derivative(x, k, parity, j)
    e = k + (-1) ** j if parity == ODD else -(k - (-1) ** j)
    return lhs == rhs * t ** (-e)


def independence_check(n: int, seed: int = 0, attempts: int = 3,
                       homogeneity_samples: int = 4) -> Dict[str, object]:
    if n < 3:
        raise OutOfRange("n must be at least 3")
    rng = random.Random(seed)
    target = 2 * (n // 2) + 2
    ranks = []
    for _ in range(attempts):
        x = random_rational_point(n, rng)
        ranks.append(_rank(jacobian(x)))
        if ranks[-1] == target:
            break
    homog = True
    for _ in range(homogeneity_samples):
        x = random_rational_point(n, rng, bound=6)
        t = Fraction(rng.randint(2, 5), rng.randint(1, 5))
        k = rng.choice([k for k in range(1, n // 2 + 1)] + [n])
        j = rng.randint(1, 2 * n)
        parity = rng.choice((ODD, EVEN))
        homog &= homogeneity_holds(x, k, parity, j, t)
    return {"n": n, "seed": seed, "target": target, "ranks": ranks,
            "rank": ranks[-1], "homogeneity": homog,
            "pass": ranks[-1] == target and homog}
