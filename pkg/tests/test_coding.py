import itertools
import math
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hofbauer.coding import (
    BoundaryHit,
    count_words,
    cylinder_interval,
    enumerate_words,
    follow,
    is_admissible,
    itinerary,
    parse_word,
    format_word,
)
from hofbauer.maps import make_beta, make_mod1
from hofbauer.numeric import CapExceeded


def test_itinerary_examples(full_shift):
    assert itinerary(full_shift, F(1, 3), 4) == (1, 2, 1, 2)
    assert itinerary(make_beta(F(5, 2)), F(9, 10), 2) == (3, 1)
    with pytest.raises(BoundaryHit) as exc:
        itinerary(full_shift, F(1, 2), 1)
    assert exc.value.step == 0


def test_cylinder_examples(full_shift):
    c = cylinder_interval(full_shift, [1])
    assert (c.lo, c.hi, c.empty) == (0, F(1, 2), False)
    c = cylinder_interval(full_shift, [1, 2])
    assert (c.lo, c.hi) == (F(1, 4), F(1, 2))


def test_golden_cylinders_brute_force(golden):
    # oracle: sample branch 2 at 1e-20 spacing near its ends and in the bulk;
    # no point of (1/beta, 1) maps back into (1/beta, 1)
    a = golden.breakpoints[1]
    eps = mpmath.mpf(10) ** -20
    samples = [a + eps, 1 - eps] + [a + (1 - a) * mpmath.mpf(i) / 1000 for i in range(1, 1000)]
    assert not any(golden.branch(2)(x) > a for x in samples)
    assert any(golden.branch(2)(x) < a for x in samples)  # so 2,1 occurs
    assert cylinder_interval(golden, [2, 2]).empty
    assert not is_admissible(golden, [2, 2])
    assert is_admissible(golden, [2, 1])


def test_full_shift_all_admissible(full_shift):
    for u in itertools.product((1, 2), repeat=6):
        assert is_admissible(full_shift, u)


def test_enumerate_examples(full_shift, golden):
    assert len(enumerate_words(full_shift, 4)) == 16
    assert enumerate_words(make_beta(F(5, 2)), 1) == [(1,), (2,), (3,)]
    # oracle: golden-mean shift forbids the factor 2,2; count = F_6 = 8
    brute = [u for u in itertools.product((1, 2), repeat=4)
             if not any(a == b == 2 for a, b in zip(u, u[1:]))]
    assert enumerate_words(golden, 4) == sorted(brute)
    assert len(brute) == 8


def test_enumerate_cap(full_shift):
    with pytest.raises(CapExceeded):
        enumerate_words(full_shift, 25)


def test_enumerate_is_sorted(mod1_nonmarkov):
    ws = enumerate_words(mod1_nonmarkov, 6)
    assert ws == sorted(ws)
    assert len(set(ws)) == len(ws)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_count_words_matches_enumeration(mod1_nonmarkov, golden, n):
    for T in (mod1_nonmarkov, golden, make_mod1(F(1, 3), F(17, 5))):
        assert count_words(T, n) == len(enumerate_words(T, n))


def test_subadditive_counts(mod1_nonmarkov):
    c = {n: count_words(mod1_nonmarkov, n) for n in range(1, 13)}
    for m in range(1, 7):
        for n in range(1, 7):
            assert c[m + n] <= c[m] * c[n]


@pytest.mark.parametrize("alpha,beta", [(F(1, 10), F(5, 2)), (0, F(5, 2)), (F(1, 3), F(7, 2)), (0, 3)])
def test_lap_count_growth(alpha, beta):
    T = make_mod1(alpha, beta)
    assert abs(math.log(count_words(T, 20)) / 20 - math.log(beta)) < 0.05


def test_word_format_round_trip():
    assert parse_word("1,2,1") == (1, 2, 1)
    assert format_word((3, 1)) == "3,1"


@st.composite
def map_and_point(draw):
    a = draw(st.fractions(min_value=0, max_value=F(49, 50), max_denominator=50))
    b = draw(st.fractions(min_value=F(11, 10), max_value=4, max_denominator=40))
    x = draw(st.fractions(min_value=0, max_value=1, max_denominator=10**5))
    return make_mod1(a, b), x


@settings(max_examples=150)
@given(map_and_point(), st.integers(1, 8))
def test_itinerary_cylinder_consistency(mx, n):
    T, x = mx
    try:
        u = itinerary(T, x, n)
    except BoundaryHit:
        return
    cyl = cylinder_interval(T, u)
    assert x in cyl
    mid = cyl.midpoint()
    try:
        assert itinerary(T, mid, n) == u
    except BoundaryHit:
        pass


@settings(max_examples=100)
@given(map_and_point(), st.integers(1, 6), st.integers(0, 10**6))
def test_nesting_and_concatenation(mx, n, seed):
    T, _ = mx
    rnd = random.Random(seed)
    words = enumerate_words(T, n)
    u = rnd.choice(words)
    cu = cylinder_interval(T, u)
    for j in range(1, T.k + 1):
        cj = cylinder_interval(T, u + (j,))
        if not cj.empty:
            assert cu.lo <= cj.lo and cj.hi <= cu.hi
    v = rnd.choice(words)
    if is_admissible(T, u + v):
        assert is_admissible(T, u) and is_admissible(T, v)


def test_follow_gives_vertex_interval(full_shift):
    V, slope, offset = follow(full_shift, (1, 2))
    assert V == (F(1, 2), 1)
    assert (slope, offset) == (2, 0)
