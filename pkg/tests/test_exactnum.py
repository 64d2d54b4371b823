from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from weyl_torus.exactnum import (
    CirclePoint,
    GaussianRational,
    as_rational,
    circle_from_tangent,
    circle_pow,
    format_rational,
    parse_rational,
    to_complex,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100)
gaussians = st.builds(GaussianRational, rationals, rationals)


def to_sympy(g):
    return sp.Rational(g.re.numerator, g.re.denominator) + sp.I * sp.Rational(g.im.numerator, g.im.denominator)


def from_sympy(e):
    re, im = sp.expand(e).as_real_imag()
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


# [TRIVIAL] examples
@pytest.mark.parametrize(
    "t, re, im",
    [(0, 1, 0), (1, 0, 1), (Fraction(1, 2), Fraction(3, 5), Fraction(4, 5))],
)
def test_circle_from_tangent_examples(t, re, im):
    assert circle_from_tangent(t) == GaussianRational(re, im)


def test_circle_pow_examples():
    i = CirclePoint(0, 1)
    x = CirclePoint(Fraction(3, 5), Fraction(4, 5))
    assert circle_pow(i, 2) == -1
    assert circle_pow(x, -1) == GaussianRational(Fraction(3, 5), Fraction(-4, 5))
    # [DERIVED] against plain Gaussian multiplication in sympy
    assert circle_pow(x, 2) == from_sympy(to_sympy(x) ** 2)
    assert circle_pow(x, 2) == GaussianRational(Fraction(-7, 25), Fraction(24, 25))


@given(rationals)
def test_tangent_points_have_exact_unit_modulus(t):
    x = circle_from_tangent(t)
    assert x.re * x.re + x.im * x.im == 1
    assert x != -1
    assert abs(abs(to_complex(x)) - 1.0) <= 1e-15


@given(rationals, st.integers(-20, 20), st.integers(-20, 20))
def test_circle_pow_is_additive(t, a, b):
    x = circle_from_tangent(t)
    assert circle_pow(x, a + b) == circle_pow(x, a) * circle_pow(x, b)


@given(rationals)
def test_circle_inverse_is_conjugate(t):
    x = circle_from_tangent(t)
    assert x * x.inverse() == 1
    assert x.inverse() == x.conjugate()


@given(gaussians, gaussians)
def test_gaussian_arithmetic_matches_sympy(a, b):
    sa, sb = to_sympy(a), to_sympy(b)
    assert a + b == from_sympy(sa + sb)
    assert a - b == from_sympy(sa - sb)
    assert a * b == from_sympy(sa * sb)
    assert a.conjugate() == from_sympy(sp.conjugate(sa))
    if b:
        assert a / b == from_sympy(sa / sb)


@given(gaussians, st.integers(-6, 6))
def test_gaussian_power(a, k):
    if not a and k < 0:
        with pytest.raises(ZeroDivisionError):
            a**k
        return
    assert a**k == from_sympy(to_sympy(a) ** k)


@given(rationals)
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_as_rational_rejects_inexact_input():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational(5) == 5
    for bad in (0.5, True, 1j, None):
        with pytest.raises(TypeError):
            as_rational(bad)


def test_circle_point_validates_modulus():
    with pytest.raises(ValueError):
        CirclePoint(1, 1)
    assert CirclePoint(GaussianRational(0, -1)) == GaussianRational(0, -1)


def test_gaussian_is_immutable_and_hashable():
    g = GaussianRational(1, 2)
    with pytest.raises(AttributeError):
        g.re = Fraction(0)
    assert hash(GaussianRational(3, 0)) == hash(Fraction(3))
    assert {g: 1}[GaussianRational(Fraction(2, 2), 2)] == 1
