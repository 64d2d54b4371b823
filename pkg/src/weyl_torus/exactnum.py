"""Exact scalars: rationals, Gaussian rationals and exact points on the unit circle.

Rationals are :class:`fractions.Fraction` (always normalized, positive
denominator).  Floating complex values are plain Python ``complex``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC

Rational = Fraction

__all__ = [
    "Rational",
    "GaussianRational",
    "CirclePoint",
    "as_rational",
    "as_gaussian",
    "circle_from_tangent",
    "circle_pow",
    "parse_rational",
    "format_rational",
    "to_complex",
]


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: an exact path must never silently round.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational number")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """Element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_rational(re))
        object.__setattr__(self, "im", as_rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(GaussianRational)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussianRational._raw(self.re * other, self.im * other)
        other = _lift(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussianRational._raw(self.re / other, self.im / other)
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussianRational._raw(Fraction(1), Fraction(0))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison / conversion ---------------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re} {sign} {abs(self.im)}*i"


def _lift(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, (int, Fraction)):
        return GaussianRational._raw(Fraction(x), Fraction(0))
    return NotImplemented


def as_gaussian(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats cannot be converted exactly")
    return GaussianRational(as_rational(x), 0)


class CirclePoint(GaussianRational):
    """Gaussian rational of modulus exactly one."""

    __slots__ = ()

    def __init__(self, re, im=0):
        if isinstance(re, GaussianRational) and im == 0:
            re, im = re.re, re.im
        super().__init__(re, im)
        if self.norm() != 1:
            raise ValueError(f"{self.re} + {self.im}i is not on the unit circle")

    @classmethod
    def _unchecked(cls, re: Fraction, im: Fraction) -> "CirclePoint":
        obj = object.__new__(CirclePoint)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def inverse(self) -> "CirclePoint":
        return CirclePoint._unchecked(self.re, -self.im)

    def conjugate(self) -> "CirclePoint":
        return CirclePoint._unchecked(self.re, -self.im)

    def __mul__(self, other):
        out = GaussianRational.__mul__(self, other)
        if isinstance(other, CirclePoint) and out is not NotImplemented:
            return CirclePoint._unchecked(out.re, out.im)
        return out

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return circle_pow(self, k)

    def __repr__(self):
        return f"CirclePoint({self.re}, {self.im})"


def circle_from_tangent(t) -> CirclePoint:
    """Map ``t`` to ``((1 - t^2) + 2t i) / (1 + t^2)``.

    Covers every rational point of the circle except ``-1``.
    """
    t = as_rational(t)
    d = 1 + t * t
    return CirclePoint._unchecked((1 - t * t) / d, 2 * t / d)


def circle_pow(x: CirclePoint, k: int) -> CirclePoint:
    if k < 0:
        x = x.conjugate()
        k = -k
    re, im = Fraction(1), Fraction(0)
    bre, bim = x.re, x.im
    while k:
        if k & 1:
            re, im = re * bre - im * bim, re * bim + im * bre
        bre, bim = bre * bre - bim * bim, 2 * bre * bim
        k >>= 1
    return CirclePoint._unchecked(re, im)


def to_complex(x) -> complex:
    if isinstance(x, complex):
        return x
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(float(x), 0.0)


def check_unit_modulus(values, tol: float = 1e-12) -> None:
    """Raise ``ValueError`` if any float value is off the unit circle by more than ``tol``."""
    for v in values:
        if not math.isfinite(abs(v)) or abs(abs(v) - 1.0) > tol:
            raise ValueError(f"point {v!r} is not on the unit circle (tol {tol:g})")
