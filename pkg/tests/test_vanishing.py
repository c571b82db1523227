import cmath
import math
import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from pentalab import vanishing as vn
from pentalab.invariants import EVEN, ODD


def brute_lambda(n, v):
    w = cmath.exp(2j * math.pi / n)
    return sum(w ** sum(s) for s in combinations(range(2, n - 1), v)
               if all(b - a >= 2 for a, b in zip(s, s[1:])))


@pytest.mark.parametrize("n,v,expected", [
    (5, 1, 2 * math.cos(4 * math.pi / 5)),
    (7, 1, -1 - 2 * math.cos(2 * math.pi / 7)),
    (7, 2, 1 + 2 * math.cos(2 * math.pi / 7)),
])
def test_lambda_examples(n, v, expected):
    assert abs(vn.lambda_direct(n, v) - expected) < 1e-9


def test_lambda_direct_matches_brute_force():
    for n in range(5, 16, 2):
        for v in range(1, (n - 3) // 2 + 1):
            assert abs(vn.lambda_direct(n, v) - brute_lambda(n, v)) < 1e-9


def test_out_of_range():
    for n, v in [(4, 1), (5, 0), (5, 2), (3, 1)]:
        with pytest.raises(vn.OutOfRange):
            vn.lambda_direct(n, v)
    with pytest.raises(vn.OutOfRange):
        vn.vanishing_check(6)
    with pytest.raises(vn.OutOfRange):
        vn.independence_check(2)


def test_compression_readings():
    for n in range(5, 18, 2):
        for v in range(1, (n - 3) // 2 + 1):
            assert vn.compression_matches(n, v, vn.GAP)
    # the literal inequality admits consecutive indices and breaks the equality
    assert not any(vn.compression_matches(n, 2, vn.LITERAL) for n in (9, 11, 13))


def test_compression_preserves_index_sums():
    n, v = 15, 4
    for s in vn.index_sequences(n, v):
        assert abs(vn.compress(s, n).evaluate() - vn.omega(n) ** sum(s)) < 1e-9
        assert set(vn.compress(s, n).atoms) <= set(vn.compressed_arc(n, v))


@pytest.mark.parametrize("n,v", [(13, 2), (9, 3), (11, 1), (17, 6)])
def test_two_paths_agree(n, v):
    assert abs(vn.lambda_via_measures(n, v) - vn.lambda_direct(n, v)) < 1e-9


def test_both_routes_where_both_apply():
    n, v = 21, 3
    assert abs(vn.lambda_via_measures(n, v, "case1") - vn.lambda_via_measures(n, v, "case2")) < 1e-9


def measure_sums(n):
    atoms = st.lists(st.integers(0, n - 1), max_size=4)
    mus = st.builds(lambda a: vn.AdaptedMeasure(n, a), atoms)
    return st.lists(st.tuples(mus, st.integers(-3, 3)), max_size=4).map(lambda t: vn.MeasureSum.of(n, t))


@settings(max_examples=60, deadline=None)
@given(measure_sums(7), measure_sums(7))
def test_evaluation_is_a_ring_homomorphism(a, b):
    assert abs((a * b).evaluate() - a.evaluate() * b.evaluate()) < 1e-9
    assert abs((a + b).evaluate() - a.evaluate() - b.evaluate()) < 1e-9
    assert abs((-a).evaluate() + a.evaluate()) < 1e-9


def test_measure_basics():
    mu = vn.AdaptedMeasure(5, (1, 6, 3))
    assert mu.atoms == (1, 1, 3) and mu.mass == 3 and not mu.sparse
    assert mu.multiplicities() == {1: 2, 3: 1}
    assert vn.AdaptedMeasure(5, (0, 2)).sparse
    with pytest.raises(ValueError):
        mu * vn.AdaptedMeasure(7, (1,))


@pytest.mark.parametrize("n", [5, 7, 9])
def test_full_mass_sums_vanish(n):
    for j in range(1, n):
        assert abs(vn.full_mass_sum(n, j).evaluate()) < 1e-9
    assert abs(vn.full_mass_sum(n, n).evaluate() - 1) < 1e-9


def test_case1_positivity_and_case2_signs():
    for n in range(5, 26, 2):
        for v in range(1, (n - 3) // 2 + 1):
            if 4 * v < n:
                assert vn.case1_positive(n, v)
            else:
                assert vn.case2_sign_failures(n, v) == []


@pytest.mark.parametrize("n", [5, 9, 25])
def test_vanishing_reports(n):
    rep = vn.vanishing_check(n)
    assert rep["pass"]
    assert len(rep["rows"]) == (n - 3) // 2
    assert all(r["margin"] > 1e-9 for r in rep["rows"])
    if n == 5:
        assert abs(rep["rows"][0]["margin"] - (1 + (1 + 5 ** 0.5) / 2)) < 1e-9


@pytest.mark.parametrize("n", [5, 7])
def test_h_gradient_is_a_power_vector(n):
    for k in range(2, n // 2 + 1):
        g = vn.h_gradient(n, k)
        assert vn.proportional(g, vn.power_vector(n, k - 1))
        assert not vn.proportional(g, vn.power_vector(n, k))


@pytest.mark.parametrize("n,target", [(3, 4), (4, 6), (5, 6), (6, 8), (7, 8), (8, 10)])
def test_jacobian_rank(n, target):
    rep = vn.independence_check(n, seed=n)
    assert rep["target"] == target and rep["rank"] == target and rep["pass"]


def test_rank_helper():
    assert vn._rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert vn._rank([[F(0), F(1)], [F(1), F(0)]]) == 2
    assert vn._rank([[F(0)] * 3] * 2) == 0


def test_homogeneity_spot_check():
    x = vn.random_rational_point(4, random.Random(0))
    assert vn.homogeneity_holds(x, 1, ODD, 2, 3)
    assert vn.homogeneity_holds(x, 1, EVEN, 2, 3)
    rng = random.Random(5)
    for _ in range(20):
        x = vn.random_rational_point(5, rng, bound=6)
        k = rng.choice([1, 2, 5])
        assert vn.homogeneity_holds(x, k, rng.choice((ODD, EVEN)), rng.randint(1, 10), F(rng.randint(2, 7), 3))
