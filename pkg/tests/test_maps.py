from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hofbauer.maps import (
    cubic_neg_beta_parameter,
    from_spec,
    golden_mean,
    make_beta,
    make_mod1,
    make_neg_beta,
    to_spec,
)
from hofbauer.numeric import DomainError


def test_mod1_binary():
    T = make_mod1(0, 2)
    assert T.breakpoints == (0, F(1, 2), 1)
    assert T.k == 2
    assert T.branch(1)(F(1, 4)) == F(1, 2)
    assert T.branch(2)(F(3, 4)) == F(1, 2)
    assert T.branch(2).intercept == -1


def test_mod1_values():
    assert make_mod1(F(1, 2), F(5, 2))(F(3, 10)) == F(1, 4)
    assert make_mod1(0, 3)(F(1, 3)) == 0


def test_branch_count_is_ceiling():
    for a, b in [(F(1, 10), F(5, 2)), (F(1, 2), F(5, 2)), (0, 3), (F(9, 10), F(21, 10))]:
        T = make_mod1(a, b)
        assert T.k == -(-(a + b).numerator // (a + b).denominator)


def test_beta_constructors():
    assert make_beta(2).breakpoints == make_mod1(0, 2).breakpoints
    T = make_beta(F(5, 2))
    assert T.breakpoints == (0, F(2, 5), F(4, 5), 1)


def test_golden_breakpoint():
    T = make_beta(golden_mean())
    # 1/beta = beta - 1 from t^2 - t - 1
    b = golden_mean()
    assert abs(T.breakpoints[1] - (b - 1)) < mpmath.mpf(10) ** -30
    assert float(T.breakpoints[1]) == pytest.approx(0.618034, abs=1e-6)


def test_neg_beta():
    T = make_neg_beta(1.8)
    assert T(0) == 1
    assert abs(T(1) - mpmath.mpf("0.2")) < 1e-30
    assert abs(T(0.5) - mpmath.mpf("0.1")) < 1e-30
    T17 = make_neg_beta(1.7)
    assert T17(1 / mpmath.mpf("1.7")) == 1


def test_cubic_parameter_against_numpy_roots():
    roots = np.roots([1, -2, 1, -1])
    real = roots[np.abs(roots.imag) < 1e-12].real
    assert len(real) == 1
    b = cubic_neg_beta_parameter()
    assert float(b) == pytest.approx(real[0], abs=1e-14)
    assert abs(b**3 - 2 * b**2 + b - 1) < mpmath.mpf(10) ** -35
    T = make_neg_beta(b)
    assert float(T.breakpoints[1]) == pytest.approx(0.56984, abs=1e-5)


def test_eval_endpoint_rule():
    T = make_mod1(0, 2)
    assert T(1) == 1
    assert T(F(1, 4)) == F(1, 2)


def test_eval_breakpoint_flag():
    T = make_mod1(0, 2)
    y, hit = T.eval_flagged(F(1, 2))
    assert y == 0 and hit
    y, hit = T.eval_flagged(F(1, 3))
    assert y == F(2, 3) and not hit


def test_orbit_examples():
    T = make_mod1(0, 2)
    pts, flags = T.orbit(F(1, 3), 3)
    assert pts == [F(1, 3), F(2, 3), F(1, 3), F(2, 3)]
    assert not any(flags)
    pts, flags = T.orbit(F(1, 2), 1)
    assert pts == [F(1, 2), 0]
    assert flags[0]
    pts, _ = make_beta(F(5, 2)).orbit(0, 2)
    assert pts == [0, 0, 0]


@pytest.mark.parametrize(
    "ctor,args",
    [(make_mod1, (1, 2)), (make_mod1, (0, 1)), (make_mod1, (F(-1, 2), 2)), (make_beta, (F(1, 2),)),
     (make_neg_beta, (F(3, 2),)), (make_neg_beta, (2,))],
)
def test_parameter_errors(ctor, args):
    with pytest.raises(DomainError):
        ctor(*args)


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        make_mod1(0, 2)(F(3, 2))


def test_spec_round_trip():
    for spec in [
        {"type": "mod1", "alpha": "1/10", "beta": "5/2"},
        {"type": "beta", "beta": {"minpoly": [-1, -1, 1], "bracket": [1.6, 1.7]}},
        {"type": "negbeta", "beta": {"minpoly": [-1, 1, -2, 1], "bracket": [1.7, 1.8]}},
    ]:
        T = from_spec(spec)
        assert from_spec(to_spec(T)) == T
    T = make_beta(golden_mean())
    assert from_spec(to_spec(T)) == T


@st.composite
def mod1_maps(draw):
    a = draw(st.fractions(min_value=0, max_value=F(49, 50), max_denominator=50))
    b = draw(st.fractions(min_value=F(11, 10), max_value=5, max_denominator=50))
    return make_mod1(a, b)


@given(mod1_maps(), st.fractions(min_value=0, max_value=1, max_denominator=10**6))
def test_eval_stays_in_unit_interval(T, x):
    y = T(x)
    assert 0 <= y <= 1


@given(mod1_maps(), st.fractions(min_value=0, max_value=1, max_denominator=1000),
       st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_monotone_on_branches(T, x, y):
    jx, hx = T.locate(x)
    jy, hy = T.locate(y)
    if x < y and jx == jy and not hx and not hy:
        assert (T(x) < T(y)) == T.branch(jx).increasing


@settings(max_examples=50)
@given(mod1_maps(), st.fractions(min_value=0, max_value=1, max_denominator=997))
def test_exact_orbits_match_high_precision(T, x):
    """Rational orbits are exact: replaying them at 300 bits agrees to rounding."""
    pts, flags = T.orbit(x, 6)
    assert all(isinstance(p, F) for p in pts)

    def hi(q):
        return mpmath.mpf(q.numerator) / q.denominator

    with mpmath.workprec(300):
        y = hi(x)
        for i in range(6):
            br = T.branch(T.locate(pts[i])[0])
            y = hi(br.slope) * y + hi(br.intercept)
            assert abs(y - hi(pts[i + 1])) < mpmath.mpf(2) ** -250
