"""Sparse Laurent polynomials, the multiplicative Weyl group action and orbit polynomials."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InternalError, ValidationError
from .exactnum import CirclePoint, GaussianRational, as_rational
from .rootdata import (
    DEFAULT_ORBIT_CAP,
    RootSystemData,
    Vector,
    dominant_representative,
    mat_vec,
    orbit,
    signed_orbit,
    unit_vector,
)

__all__ = [
    "LaurentPoly",
    "InvariantExpansion",
    "act",
    "orbit_polynomial",
    "fundamental_invariants",
    "evaluate",
    "evaluate_float",
    "anti_invariant",
    "rewrite_in_fundamental",
    "orbit_product_expand",
    "to_orbit_basis",
    "is_invariant",
]


class LaurentPoly:
    """Immutable sparse Laurent polynomial with rational coefficients."""

    __slots__ = ("_terms", "nvars", "_hash")

    def __init__(self, terms: Optional[Mapping] = None, nvars: Optional[int] = None):
        clean: Dict[Vector, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if nvars is None:
                    nvars = len(exp)
                elif len(exp) != nvars:
                    raise ValidationError("exponent vectors of unequal length")
                c = as_rational(c)
                if c:
                    clean[exp] = clean.get(exp, Fraction(0)) + c
                    if not clean[exp]:
                        del clean[exp]
        if nvars is None:
            raise ValidationError("nvars is required for an empty Laurent polynomial")
        self._terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: Dict[Vector, Fraction], nvars: int) -> "LaurentPoly":
        obj = object.__new__(cls)
        obj._terms = terms
        obj.nvars = nvars
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1) -> "LaurentPoly":
        return cls({tuple(exp): coeff}, len(exp))

    @classmethod
    def constant(cls, c, nvars: int) -> "LaurentPoly":
        return cls({(0,) * nvars: c}, nvars)

    @property
    def terms(self) -> Dict[Vector, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coeff(self, exp) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> Optional["LaurentPoly"]:
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise ValidationError("Laurent polynomials in different numbers of variables")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._from_clean(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._from_clean({e: -c for e, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return LaurentPoly._from_clean({}, self.nvars)
            return LaurentPoly._from_clean({e: c * other for e, c in self._terms.items()}, self.nvars)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: Dict[Vector, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._from_clean({e: c for e, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = LaurentPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, LaurentPoly) else other
        if o is None:
            return NotImplemented
        return self.nvars == o.nvars and self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "LaurentPoly(0)"
        parts = []
        for e in sorted(self._terms, reverse=True):
            parts.append(f"{self._terms[e]}*x^{list(e)}")
        return "LaurentPoly(" + " + ".join(parts) + ")"

    # structural operations ---------------------------------------------------
    def hat(self) -> "LaurentPoly":
        """Substitute ``x -> x^{-1}``; on the torus this is complex conjugation."""
        return LaurentPoly._from_clean({tuple(-a for a in e): c for e, c in self._terms.items()}, self.nvars)

    def euler_derivative(self, k: int) -> "LaurentPoly":
        """``x_k * d/dx_k``."""
        return LaurentPoly._from_clean(
            {e: c * e[k] for e, c in self._terms.items() if e[k]}, self.nvars
        )

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        return LaurentPoly._from_clean(
            {tuple(a + b for a, b in zip(e, exp)): c for e, c in self._terms.items()}, self.nvars
        )

    def lex_leading(self) -> Tuple[Vector, Fraction]:
        e = max(self._terms)
        return e, self._terms[e]

    def lex_lowest(self) -> Tuple[Vector, Fraction]:
        e = min(self._terms)
        return e, self._terms[e]

    def exact_divide(self, other: "LaurentPoly") -> "LaurentPoly":
        """Return ``q`` with ``q * other == self``; raise ``ValueError`` if no such ``q``.

        Leading-term division in lex order.  Every term of a genuine quotient
        lies between ``lead(self)/lead(other)`` and ``low(self)/low(other)``,
        which bounds the loop.
        """
        if not other:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if not self:
            return LaurentPoly._from_clean({}, self.nvars)
        g_lead, g_lc = other.lex_leading()
        g_low, _ = other.lex_lowest()
        f_low, _ = self.lex_lowest()
        floor = tuple(a - b for a, b in zip(f_low, g_low))
        rem = dict(self._terms)
        quot: Dict[Vector, Fraction] = {}
        gterms = list(other._terms.items())
        while rem:
            r_lead = max(rem)
            q_exp = tuple(a - b for a, b in zip(r_lead, g_lead))
            if q_exp < floor:
                raise ValueError("Laurent polynomial is not divisible")
            q_c = rem[r_lead] / g_lc
            quot[q_exp] = q_c
            for e, c in gterms:
                t = tuple(a + b for a, b in zip(e, q_exp))
                v = rem.get(t, 0) - q_c * c
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return LaurentPoly._from_clean(quot, self.nvars)


class InvariantExpansion(dict):
    """Coordinates of an invariant in the orbit polynomial basis: dominant vector -> coefficient."""

    def to_laurent(self, d: RootSystemData) -> LaurentPoly:
        out = LaurentPoly._from_clean({}, d.rank)
        for lam, c in self.items():
            out = out + orbit_polynomial(d, lam) * c
        return out


def act(b, f: LaurentPoly) -> LaurentPoly:
    """Apply the integer matrix ``b``: each monomial ``x^alpha`` maps to ``x^{b alpha}``."""
    if len(b) != f.nvars or any(len(row) != f.nvars for row in b):
        raise ValidationError(f"matrix of size {len(b)} does not act on {f.nvars} variables")
    return LaurentPoly._from_clean({mat_vec(b, e): c for e, c in f.items()}, f.nvars)


def orbit_polynomial(d: RootSystemData, alpha, cap: int = DEFAULT_ORBIT_CAP) -> LaurentPoly:
    """``(1/|W alpha|) * sum of x^beta`` over the orbit of ``alpha``."""
    key = ("orbpoly", tuple(alpha))
    hit = d._cache.get(key)
    if hit is not None and len(hit) <= cap:
        return hit
    orb = orbit(d, alpha, cap)
    c = Fraction(1, len(orb))
    poly = LaurentPoly._from_clean({b: c for b in orb}, d.rank)
    d._cache[key] = poly
    return poly


def fundamental_invariants(d: RootSystemData):
    return [orbit_polynomial(d, unit_vector(d.rank, i)) for i in range(d.rank)]


def is_invariant(d: RootSystemData, f: LaurentPoly) -> bool:
    return all(act(b, f) == f for b in d.generators)


class _IntPowers:
    """Integer Gaussian powers of torus points written as ``(a + b i) / c``.

    Negative exponents use the conjugate, since ``|x| = 1``.
    """

    def __init__(self, x):
        self.num = []
        self.den = []
        for v in x:
            c = math.lcm(v.re.denominator, v.im.denominator)
            self.num.append((int(v.re * c), int(v.im * c)))
            self.den.append(c)
        self._pw = [{0: (1, 0)} for _ in x]
        self._dp = [{0: 1} for _ in x]

    def power(self, k: int, e: int):
        m = abs(e)
        cache = self._pw[k]
        hit = cache.get(m)
        if hit is None:
            a, b = self.num[k]
            lo = max(j for j in cache if j <= m)
            re, im = cache[lo]
            for j in range(lo + 1, m + 1):
                re, im = re * a - im * b, re * b + im * a
                cache[j] = (re, im)
            hit = cache[m]
        return hit if e >= 0 else (hit[0], -hit[1])

    def den_power(self, k: int, m: int) -> int:
        cache = self._dp[k]
        hit = cache.get(m)
        if hit is None:
            hit = self.den[k] ** m
            cache[m] = hit
        return hit


def _as_circle_points(x) -> list:
    pts = []
    for v in x:
        if isinstance(v, CirclePoint):
            pts.append(v)
        elif isinstance(v, GaussianRational):
            pts.append(CirclePoint(v.re, v.im))
        else:
            pts.append(CirclePoint(v, 0))
    return pts


def _evaluate_int(f: "LaurentPoly", pw: _IntPowers) -> GaussianRational:
    if not f:
        return GaussianRational._raw(Fraction(0), Fraction(0))
    n = f.nvars
    top = [0] * n
    lcm_den = 1
    for e, c in f.items():
        lcm_den = math.lcm(lcm_den, c.denominator)
        for k in range(n):
            if abs(e[k]) > top[k]:
                top[k] = abs(e[k])
    sre = 0
    sim = 0
    for e, c in f.items():
        re, im = c.numerator * (lcm_den // c.denominator), 0
        scale = 1
        for k in range(n):
            a = e[k]
            if a:
                pr, pi = pw.power(k, a)
                re, im = re * pr - im * pi, re * pi + im * pr
            gap = top[k] - abs(a)
            if gap:
                scale *= pw.den_power(k, gap)
        sre += re * scale
        sim += im * scale
    denom = lcm_den
    for k in range(n):
        if top[k]:
            denom *= pw.den_power(k, top[k])
    return GaussianRational._raw(Fraction(sre, denom), Fraction(sim, denom))


def evaluate(f: LaurentPoly, x: Sequence) -> GaussianRational:
    """Exact value of ``f`` at a point of the torus with Gaussian rational coordinates."""
    if len(x) != f.nvars:
        raise ValidationError(f"point has {len(x)} coordinates, polynomial has {f.nvars} variables")
    return _evaluate_int(f, _IntPowers(_as_circle_points(x)))


def evaluate_many(polys: Sequence[LaurentPoly], x: Sequence) -> list:
    """Evaluate several polynomials at one exact torus point, sharing the power cache."""
    pw = _IntPowers(_as_circle_points(x))
    return [_evaluate_int(f, pw) for f in polys]


def evaluate_float(f: LaurentPoly, x) -> np.ndarray:
    """Float evaluation at torus points.

    ``x`` is a complex array of shape ``(nvars,)`` or ``(npoints, nvars)``; the
    arguments of the entries are used, so inputs must lie on the unit circle.
    """
    arr = np.asarray(x, dtype=complex)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.shape[1] != f.nvars:
        raise ValidationError(f"points have {arr.shape[1]} coordinates, expected {f.nvars}")
    if not f:
        out = np.zeros(arr.shape[0], dtype=complex)
        return out[0] if single else out
    exps = np.array(list(f._terms.keys()), dtype=float)
    coeffs = np.array([float(c) for c in f._terms.values()])
    phases = np.angle(arr) @ exps.T
    vals = np.exp(1j * phases) @ coeffs
    return vals[0] if single else vals


def anti_invariant(d: RootSystemData, alpha, cap: int = DEFAULT_ORBIT_CAP) -> LaurentPoly:
    """``sum_B det(B) x^{B alpha}`` over the whole group (no normalization)."""
    signs = signed_orbit(d, alpha, cap)
    return LaurentPoly._from_clean({b: Fraction(s) for b, s in signs.items()}, d.rank)


def to_orbit_basis(d: RootSystemData, f: LaurentPoly, check: bool = True) -> InvariantExpansion:
    """Coordinates of an invariant ``f`` in the orbit polynomial basis."""
    if check and not is_invariant(d, f):
        raise ValidationError("Laurent polynomial is not invariant under the Weyl group")
    out = InvariantExpansion()
    for e, c in f.items():
        if all(a >= 0 for a in e):
            out[e] = c * len(orbit(d, e))
    return out


def orbit_product_expand(d: RootSystemData, alpha, beta) -> InvariantExpansion:
    """Expand ``orb_alpha * orb_beta`` in the orbit basis via the orbit recurrence."""
    alpha = tuple(alpha)
    orb_b = orbit(d, beta)
    w = Fraction(1, len(orb_b))
    out = InvariantExpansion()
    for bt in orb_b:
        s = tuple(a + b for a, b in zip(alpha, bt))
        lam, _ = dominant_representative(d, s)
        out[lam] = out.get(lam, 0) + w
    return InvariantExpansion({k: v for k, v in out.items() if v})


def _height_key(d: RootSystemData):
    h = d.height_vector

    def key(lam):
        return (sum((a * b for a, b in zip(h, lam)), Fraction(0)), lam)

    return key


def _theta_power_expansion(d: RootSystemData, mu: Vector) -> InvariantExpansion:
    """Orbit-basis expansion of ``theta^mu``, memoized per root system."""
    memo = d._cache.setdefault("theta_pow", {})
    if mu in memo:
        return memo[mu]
    if not any(mu):
        res = InvariantExpansion({mu: Fraction(1)})
        memo[mu] = res
        return res
    i = next(k for k, a in enumerate(mu) if a)
    prev = list(mu)
    prev[i] -= 1
    prev = tuple(prev)
    base = _theta_power_expansion(d, prev)
    res: Dict[Vector, Fraction] = {}
    ei = unit_vector(d.rank, i)
    for lam, c in base.items():
        for k, v in orbit_product_expand(d, lam, ei).items():
            res[k] = res.get(k, 0) + c * v
    out = InvariantExpansion({k: v for k, v in res.items() if v})
    memo[mu] = out
    return out


def rewrite_in_fundamental(d: RootSystemData, f, max_iter: int = 100000, check: bool = True):
    """Express an invariant Laurent polynomial as a polynomial in the fundamental invariants.

    ``f`` may be a :class:`LaurentPoly` or an :class:`InvariantExpansion`.  The
    leading orbit term (largest simple-root height, lexicographic tie break)
    is cancelled by a multiple of the matching product of invariants until
    nothing is left.
    """
    from .mpoly import MPoly

    if isinstance(f, LaurentPoly):
        if f.nvars != d.rank:
            raise ValidationError("polynomial arity does not match the rank")
        rem = dict(to_orbit_basis(d, f, check=check))
    else:
        rem = dict(f)
    key = _height_key(d)
    result: Dict[Vector, Fraction] = {}
    it = 0
    while rem:
        it += 1
        if it > max_iter:
            raise InternalError(f"rewriting did not terminate after {max_iter} steps")
        lead = max(rem, key=key)
        c = rem[lead]
        exp_lead = _theta_power_expansion(d, lead)
        lc = exp_lead.get(lead)
        if not lc:
            raise InternalError(f"theta^{lead} has no leading orbit term")
        q = c / lc
        result[lead] = result.get(lead, 0) + q
        for k, v in exp_lead.items():
            nv = rem.get(k, 0) - q * v
            if nv:
                rem[k] = nv
            else:
                rem.pop(k, None)
        if lead in rem:
            raise InternalError("leading term was not cancelled")
    return MPoly({e: c for e, c in result.items() if c}, d.rank)


def expand_in_invariants(d: RootSystemData, p) -> LaurentPoly:
    """Substitute the fundamental invariants into a polynomial ``p`` in ``z``."""
    total: Dict[Vector, Fraction] = {}
    for mu, c in p.items():
        for lam, v in _theta_power_expansion(d, tuple(mu)).items():
            total[lam] = total.get(lam, 0) + c * v
    return InvariantExpansion({k: v for k, v in total.items() if v}).to_laurent(d)


def sum_polys(polys: Iterable[LaurentPoly], nvars: int) -> LaurentPoly:
    out: Dict[Vector, Fraction] = {}
    for p in polys:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return LaurentPoly._from_clean({e: c for e, c in out.items() if c}, nvars)
