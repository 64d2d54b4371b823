"""Hermite matrix polynomials, orbit space membership and torus preimages.

Families B, C, D reduce to a monic real polynomial whose roots must lie in
``[-2, 2]``.  For family A the reduction produces a polynomial given in the
Chebyshev basis whose roots must lie in ``[-1, 1]``.  In both cases the
Hermite matrix is ``H_ij = a^2 p_{i+j-2} - p_{i+j}``, where ``p_k`` are the power
sums of the roots (equivalently the traces of powers of the companion matrix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericError, ValidationError
from .exactnum import CirclePoint, GaussianRational
from .laurent import evaluate_float, evaluate_many, fundamental_invariants
from .mpoly import (
    CharPoly,
    MPoly,
    SymMatrixPoly,
    companion_matrix,
    matrix_poly_power_traces,
    newton_power_sums,
    psd_test,
)
from .rootdata import root_system, validate_family_rank

__all__ = [
    "RealEmbedding",
    "CoefficientMap",
    "HermiteMatrix",
    "MembershipReport",
    "real_embedding",
    "symmetric_system_coeffs",
    "hermite_matrix",
    "hermite_at",
    "membership",
    "theta_map",
    "theta_map_float",
    "hermite_form_general",
    "region_raster",
    "chebyshev_companion",
    "chebyshev_to_monomial",
    "aberth_roots",
    "preimages",
]

I_UNIT = GaussianRational(0, 1)


# --------------------------------------------------------------------------
# real embedding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RealEmbedding:
    """Linear change between complex invariant coordinates and real coordinates.

    ``pairs`` lists ``(lead, partner)`` index pairs (0-based) of complex
    conjugate coordinates.  The real coordinates are
    ``r_lead = (z_lead + z_partner)/2`` and ``r_partner = (z_lead - z_partner)/(2i)``,
    so that ``z_lead = r_lead + i r_partner``.  Unpaired coordinates are real.
    """

    family: str
    rank: int
    sigma: Tuple[int, ...]
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def is_trivial(self) -> bool:
        return not self.pairs

    def to_real(self, values: Sequence) -> list:
        out = list(values)
        exact = all(isinstance(v, (GaussianRational, int, Fraction)) for v in values)
        for lead, partner in self.pairs:
            a, b = values[lead], values[partner]
            if exact:
                a, b = _gauss(a), _gauss(b)
                out[lead] = (a + b) / 2
                out[partner] = (a - b) * GaussianRational(0, -1) / 2
            else:
                out[lead] = (complex(a) + complex(b)) / 2
                out[partner] = (complex(a) - complex(b)) / 2j
        return [_realify(v, exact) for v in out]

    def to_complex(self, values: Sequence) -> list:
        out = list(values)
        exact = all(isinstance(v, (GaussianRational, int, Fraction)) for v in values)
        for lead, partner in self.pairs:
            r, s = values[lead], values[partner]
            if exact:
                out[lead] = _gauss(r) + I_UNIT * _gauss(s)
                out[partner] = _gauss(r) - I_UNIT * _gauss(s)
            else:
                out[lead] = complex(r) + 1j * complex(s)
                out[partner] = complex(r) - 1j * complex(s)
        return out

    def to_real_array(self, values: np.ndarray) -> np.ndarray:
        """Vectorized ``to_real`` over the last axis of a complex array."""
        v = np.asarray(values, dtype=complex)
        out = v.copy()
        for lead, partner in self.pairs:
            out[..., lead] = (v[..., lead] + v[..., partner]) / 2
            out[..., partner] = (v[..., lead] - v[..., partner]) / 2j
        return out.real if np.iscomplexobj(out) else out

    def substitution(self) -> List[MPoly]:
        """Complex coordinates as polynomials in the real coordinates."""
        n = self.rank
        subs = [MPoly.var(i, n) for i in range(n)]
        for lead, partner in self.pairs:
            r, s = MPoly.var(lead, n), MPoly.var(partner, n)
            subs[lead] = r + s * I_UNIT
            subs[partner] = r - s * I_UNIT
        return subs


def _gauss(v) -> GaussianRational:
    if isinstance(v, GaussianRational):
        return v
    return GaussianRational(v, 0)


def _realify(v, exact: bool):
    if exact:
        if isinstance(v, GaussianRational):
            if v.im != 0:
                raise ValidationError(f"coordinate {v} is not real after the real embedding")
            return v.re
        return Fraction(v)
    c = complex(v)
    return c.real


def real_embedding(family: str, rank: int) -> RealEmbedding:
    d = root_system(family, rank)
    sigma = d.sigma
    if family == "D" and rank % 2 == 1:
        # z_n carries the real part, z_{n-1} the imaginary part
        pairs = ((rank - 1, rank - 2),)
    else:
        pairs = tuple((i, sigma[i]) for i in range(rank) if i < sigma[i])
    return RealEmbedding(family, rank, sigma, pairs)


# --------------------------------------------------------------------------
# coefficient maps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientMap:
    """Coefficients of the univariate polynomial attached to a point ``z``.

    Families B, C, D: ``coeffs = (c_1..c_n)`` of ``x^n + c_1 x^{n-1} + ... + c_n``.
    Family A: ``coeffs = (d_1..d_n)`` of ``T_n + d_1 T_{n-1} + ... + d_{n-1} T_1 + d_n/2 T_0``.
    ``coordinates`` is ``"complex"`` or ``"real"``.
    """

    family: str
    rank: int
    coeffs: Tuple[MPoly, ...]
    coordinates: str = "real"

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def evaluate(self, z) -> list:
        return [c(z) for c in self.coeffs]


def _binom(n, k):
    return math.comb(n, k)


def _z(i, n):
    """1-based variable."""
    return MPoly.var(i - 1, n)


def _const(c, n):
    return MPoly.constant(c, n)


def _system_I_coeffs(rank: int) -> List[MPoly]:
    """``c_0..c_n`` of system (I) for A_rank, in complex coordinates."""
    n = rank + 1
    cs = [_const(1, rank)]
    for i in range(1, n):
        cs.append(_z(i, rank) * ((-1) ** i * _binom(n, i)))
    cs.append(_const((-1) ** n, rank))
    return cs


def _conj_complex_coords(p: MPoly, sigma: Sequence[int]) -> MPoly:
    """Conjugate a polynomial in coordinates obeying ``conj(z_j) = z_sigma(j)``."""
    out = {}
    for e, c in p.conjugate().items():
        ne = [0] * len(e)
        for j, a in enumerate(e):
            ne[sigma[j]] += a
        out[tuple(ne)] = c
    return MPoly(out, p.nvars)


@lru_cache(maxsize=None)
def _coeffs_complex(family: str, rank: int) -> Tuple[MPoly, ...]:
    n = rank
    if family == "A":
        sigma = root_system("A", rank).sigma
        cs = _system_I_coeffs(rank)
        ncoef = rank + 1
        ds = []
        for ell in range(1, ncoef + 1):
            acc = MPoly.zero(rank)
            for i in range(ell + 1):
                acc = acc + cs[i] * _conj_complex_coords(cs[ell - i], sigma)
            ds.append(acc)
        return tuple(ds)
    cs = []
    top = n if family == "C" else (n - 1 if family == "B" else n - 2)
    for i in range(1, top + 1):
        cs.append(_z(i, n) * ((-2) ** i * _binom(n, i)))
    if family == "B":
        inner = _z(n, n) ** 2 * (2**n) - _const(1, n)
        for i in range(1, n):
            inner = inner - _z(i, n) * _binom(n, i)
        cs.append(inner * ((-2) ** n))
    elif family == "D":
        zn, zn1 = _z(n, n), _z(n - 1, n)
        if n % 2 == 0:
            a = zn * zn1 * 2 ** (n - 1)
            for j in range(1, (n - 2) // 2 + 1):
                a = a - _z(2 * j - 1, n) * _binom(n, 2 * j - 1)
            b = (zn**2 + zn1**2) * 2 ** (n - 2) - _const(1, n)
            for j in range(1, (n - 2) // 2 + 1):
                b = b - _z(2 * j, n) * _binom(n, 2 * j)
        else:
            a = zn * zn1 * 2 ** (n - 1) - _const(1, n)
            for j in range(1, (n - 3) // 2 + 1):
                a = a - _z(2 * j, n) * _binom(n, 2 * j)
            b = (zn**2 + zn1**2) * 2 ** (n - 2)
            for j in range(0, (n - 3) // 2 + 1):
                b = b - _z(2 * j + 1, n) * _binom(n, 2 * j + 1)
        cs.append(a * ((-2) ** (n - 1)))
        cs.append(b * ((-2) ** n))
    return tuple(cs)


def displayed_type_a_coeffs(rank: int) -> Tuple[MPoly, ...]:
    """The closed-form ``d_l`` of the type A theorem (complex coordinates)."""
    n = rank + 1
    out = []
    for ell in range(1, n):
        acc = (_z(ell, rank) + _z(n - ell, rank)) * _binom(n, ell)
        for i in range(1, ell):
            acc = acc + _z(i, rank) * _z(n - ell + i, rank) * (_binom(n, i) * _binom(n, ell - i))
        out.append(acc * ((-1) ** ell))
    acc = _const(2, rank)
    for i in range(1, n):
        acc = acc + _z(i, rank) ** 2 * _binom(n, i) ** 2
    out.append(acc * ((-1) ** n))
    return tuple(out)


def symmetric_system_coeffs(family: str, rank: int, real: bool = True) -> CoefficientMap:
    """Coefficient polynomials ``c_i(z)`` (B, C, D) or ``d_l(z)`` (A).

    With ``real=True`` the real-embedding substitution is applied for A and odd D.
    """
    family = family.upper()
    validate_family_rank(family, rank)
    cs = _coeffs_complex(family, rank)
    emb = real_embedding(family, rank)
    if real and not emb.is_trivial:
        subs = emb.substitution()
        cs = tuple(_substitute_real(c, subs) for c in cs)
        return CoefficientMap(family, rank, cs, "real")
    return CoefficientMap(family, rank, cs, "complex" if not emb.is_trivial else "real")


def _substitute_real(p: MPoly, subs: Sequence[MPoly]) -> MPoly:
    q = p.substitute(subs)
    if not isinstance(q, MPoly):
        q = MPoly.constant(q, p.nvars)
    if not q.is_real():
        raise ValidationError("coefficient polynomial is not real after the real embedding")
    return q


# --------------------------------------------------------------------------
# Chebyshev basis helpers (family A)
# --------------------------------------------------------------------------

def chebyshev_t_coeffs(k: int) -> List[int]:
    """Monomial coefficients (ascending) of the univariate Chebyshev polynomial T_k."""
    t0, t1 = [1], [0, 1]
    if k == 0:
        return t0
    for _ in range(k - 1):
        t2 = [0] + [2 * c for c in t1]
        for i, c in enumerate(t0):
            t2[i] -= c
        t0, t1 = t1, t2
    return t1


def chebyshev_to_monomial(ds: Sequence, one=Fraction(1)) -> list:
    """Monic coefficients ``(a_1..a_n)`` of ``g / lc(g)`` where
    ``g = T_n + d_1 T_{n-1} + ... + d_{n-1} T_1 + d_n/2 T_0``.

    Returned in the form ``x^n + a_1 x^{n-1} + ... + a_n``.
    """
    n = len(ds)
    asc = [0] * (n + 1)
    weights = [one] + list(ds[:-1]) + [ds[-1] / 2 if not isinstance(ds[-1], MPoly) else ds[-1] * Fraction(1, 2)]
    for k in range(n + 1):
        w = weights[n - k]  # coefficient of T_k
        for i, c in enumerate(chebyshev_t_coeffs(k)):
            if c:
                asc[i] = asc[i] + w * c
    lead = 2 ** (n - 1)
    return [_div(asc[n - i], lead) for i in range(1, n + 1)]


def _div(x, k):
    if isinstance(x, MPoly):
        return x * Fraction(1, k)
    if isinstance(x, (int, Fraction)):
        return Fraction(x) / k
    return x / k


def chebyshev_companion(ds: Sequence, one=Fraction(1), zero=Fraction(0)):
    """Matrix of multiplication by ``x`` in the basis ``T_0..T_{n-1}`` modulo ``g``."""
    n = len(ds)
    half = one * Fraction(1, 2)
    m = [[zero for _ in range(n)] for _ in range(n)]
    if n == 1:
        # x T_0 = T_1 = -d_1/2 T_0 modulo T_1 + d_1/2 T_0
        m[0][0] = -_div(ds[0], 2)
        return m
    m[1][0] = one
    for j in range(1, n - 1):
        m[j + 1][j] = half
        m[j - 1][j] = half
    # 2x T_{n-1} = T_n + T_{n-2} with T_n = -(d_1 T_{n-1} + ... + d_{n-1} T_1 + d_n/2 T_0)
    col = [zero for _ in range(n)]
    for ell in range(1, n):
        col[n - ell] = col[n - ell] - ds[ell - 1]
    col[0] = col[0] - _div(ds[n - 1], 2)
    col[n - 2] = col[n - 2] + one
    for r in range(n):
        m[r][n - 1] = _div(col[r], 2)
    return m


# --------------------------------------------------------------------------
# Hermite matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermiteMatrix:
    family: str
    rank: int
    companion: Tuple[Tuple[MPoly, ...], ...]
    H: SymMatrixPoly
    coefficient_map: CoefficientMap
    bound: int  # roots must lie in [-bound, bound]

    @property
    def n(self) -> int:
        return self.H.n

    def evaluate(self, z) -> List[List[object]]:
        return hermite_at(self.family, self.rank, z)

    def to_json(self) -> dict:
        return {
            "schema": "weyl-torus/1",
            "kind": "hermite_matrix",
            "family": self.family,
            "rank": self.rank,
            "bound": self.bound,
            "H": self.H.to_json(),
            "companion": [[p.to_json() for p in row] for row in self.companion],
        }


def _bound(family: str) -> int:
    return 1 if family == "A" else 2


def _symbolic_companion(family: str, cmap: CoefficientMap):
    nv = cmap.rank
    one, zero = MPoly.constant(1, nv), MPoly.zero(nv)
    if family == "A":
        return chebyshev_companion(list(cmap.coeffs), one, zero)
    return companion_matrix(list(cmap.coeffs), one, zero)


def _monic_coeffs(family: str, coeffs: Sequence, one=Fraction(1)):
    if family == "A":
        return chebyshev_to_monomial(list(coeffs), one)
    return list(coeffs)


@lru_cache(maxsize=None)
def _hermite_cached(family: str, rank: int, method: str) -> HermiteMatrix:
    cmap = symmetric_system_coeffs(family, rank, real=True)
    comp = _symbolic_companion(family, cmap)
    deg = cmap.degree
    a2 = _bound(family) ** 2
    if method == "explicit":
        traces = matrix_poly_power_traces(comp, 2 * deg, method="explicit")
    else:
        one = MPoly.constant(1, rank)
        monic = _monic_coeffs(family, cmap.coeffs, one)
        traces = newton_power_sums(monic, 2 * deg, deg, one)
    rows = [[traces[i + j] * a2 - traces[i + j + 2] for j in range(deg)] for i in range(deg)]
    H = SymMatrixPoly(rows, rank)
    return HermiteMatrix(
        family=family,
        rank=rank,
        companion=tuple(tuple(r) for r in comp),
        H=H,
        coefficient_map=cmap,
        bound=_bound(family),
    )


def hermite_matrix(family: str, rank: int, method: str = "newton") -> HermiteMatrix:
    """Symbolic Hermite matrix polynomial in real coordinates.

    ``method`` selects how traces of companion powers are obtained
    (``"newton"`` or ``"explicit"``); both give identical results.
    """
    family = family.upper()
    validate_family_rank(family, rank)
    if method not in ("newton", "explicit"):
        raise ValidationError(f"unknown method {method!r}")
    return _hermite_cached(family, rank, method)


def _coefficient_values(family: str, rank: int, z) -> list:
    cmap = symmetric_system_coeffs(family, rank, real=True)
    return cmap.evaluate(list(z))


def hermite_from_coeffs(family: str, coeffs: Sequence, one=Fraction(1)) -> list:
    """Numeric Hermite matrix from coefficient values (c_i or d_l)."""
    n = len(coeffs)
    monic = _monic_coeffs(family, coeffs, one)
    p = newton_power_sums(monic, 2 * n, n, one)
    a2 = _bound(family) ** 2
    return [[a2 * p[i + j] - p[i + j + 2] for j in range(n)] for i in range(n)]


def hermite_at(family: str, rank: int, z) -> list:
    """Evaluate H at a real point (exact for rational input)."""
    family = family.upper()
    validate_family_rank(family, rank)
    z = _coerce_point(z, rank)
    vals = _coefficient_values(family, rank, z)
    exact = all(isinstance(v, Fraction) for v in z)
    return hermite_from_coeffs(family, vals, Fraction(1) if exact else 1.0)


def _coerce_point(z, rank: int) -> list:
    if len(z) != rank:
        raise ValidationError(f"point has {len(z)} coordinates, rank is {rank}")
    out = []
    for v in z:
        if isinstance(v, bool):
            raise ValidationError("boolean coordinate")
        if isinstance(v, (int, Fraction)):
            out.append(Fraction(v))
        elif isinstance(v, str):
            out.append(Fraction(v))
        elif isinstance(v, GaussianRational):
            if v.im:
                raise ValidationError("coordinates must be real")
            out.append(v.re)
        else:
            f = float(v)
            if not math.isfinite(f):
                raise ValidationError(f"non-finite coordinate {v!r}")
            out.append(f)
    return out


def hermite_form_general(p: Sequence, a) -> list:
    """Hermite matrix of ``q = (a - x)(a + x)`` for a monic polynomial ``p``.

    ``p`` lists coefficients from the leading one down, e.g. ``[1, 0, -1]`` for ``x^2 - 1``.
    """
    if not p or Fraction(p[0]) != 1:
        raise ValidationError("polynomial must be monic (leading coefficient 1)")
    if len(p) < 2:
        raise ValidationError("polynomial must have degree >= 1")
    a = Fraction(a)
    if a < 0:
        raise ValidationError("a must be nonnegative")
    cs = [Fraction(c) for c in p[1:]]
    n = len(cs)
    pw = newton_power_sums(cs, 2 * n, n)
    return [[a * a * pw[i + j] - pw[i + j + 2] for j in range(n)] for i in range(n)]


# --------------------------------------------------------------------------
# theta map
# --------------------------------------------------------------------------

def theta_map(family: str, rank: int, x, real: bool = True):
    """Fundamental invariants at a torus point.

    Exact CirclePoint / Gaussian input gives exact output; complex floats give
    floats.  With ``real=True`` the real embedding is applied.
    """
    family = family.upper()
    validate_family_rank(family, rank)
    if len(x) != rank:
        raise ValidationError(f"torus point has {len(x)} coordinates, rank is {rank}")
    d = root_system(family, rank)
    exact = all(isinstance(v, (GaussianRational, int, Fraction)) for v in x)
    if exact:
        pts = [v if isinstance(v, CirclePoint) else CirclePoint(v) for v in x]
        vals = evaluate_many(fundamental_invariants(d), pts)
    else:
        arr = np.asarray([complex(v) for v in x])
        if np.any(np.abs(np.abs(arr) - 1.0) > 1e-12) or not np.all(np.isfinite(arr)):
            raise ValidationError("float torus point is off the unit circle (tolerance 1e-12)")
        vals = [complex(evaluate_float(t, arr)) for t in fundamental_invariants(d)]
    if real:
        return real_embedding(family, rank).to_real(vals)
    return vals


def theta_map_float(family: str, rank: int, xs: np.ndarray, real: bool = True) -> np.ndarray:
    """Vectorized float Theta for an ``(npoints, rank)`` array of torus points."""
    d = root_system(family.upper(), rank)
    xs = np.asarray(xs, dtype=complex)
    vals = np.stack([evaluate_float(t, xs) for t in fundamental_invariants(d)], axis=-1)
    if real:
        return real_embedding(family.upper(), rank).to_real_array(vals)
    return vals


# --------------------------------------------------------------------------
# membership and preimages
# --------------------------------------------------------------------------

@dataclass
class MembershipReport:
    family: str
    rank: int
    point: list
    psd: bool
    charpoly: CharPoly
    rank_H: int
    exact: bool
    preimages: Optional[List[List[complex]]] = None
    residuals: Optional[List[float]] = None

    @property
    def status(self) -> str:
        if not self.psd:
            return "outside"
        if all(_positive(c, self.exact) for c in self.charpoly.coeffs):
            return "interior"
        return "boundary"

    @property
    def inside(self) -> bool:
        return self.psd

    def to_json(self) -> dict:
        from .emit import membership_to_json

        return membership_to_json(self)


def _positive(c, exact: bool, tol: float = 1e-10) -> bool:
    return c > 0 if exact else c > tol


FLOAT_TOL = 1e-10


def _float_charpoly(h: np.ndarray) -> np.ndarray:
    """Faddeev-LeVerrier in floats for a batch ``(..., n, n)``; returns ``a_1..a_n``."""
    n = h.shape[-1]
    eye = np.broadcast_to(np.eye(n), h.shape)
    m = eye.copy()
    out = []
    for k in range(1, n + 1):
        am = h @ m
        c = -np.trace(am, axis1=-2, axis2=-1) / k
        out.append(c)
        m = am + c[..., None, None] * eye
    monic = np.stack(out, axis=-1)
    signs = np.array([(-1) ** i for i in range(1, n + 1)], dtype=float)
    return monic * signs


def _float_verdict(h: np.ndarray, tol: float = FLOAT_TOL):
    """Float verdicts ``(psd, rank, coeffs)`` with a scale-aware vanishing tolerance."""
    coeffs = _float_charpoly(h)
    n = h.shape[-1]
    scale = np.maximum(1.0, np.abs(h).max(axis=(-2, -1)))
    thresh = tol * scale[..., None] ** np.arange(1, n + 1)
    nonzero = np.abs(coeffs) > thresh
    psd = np.all(coeffs >= -thresh, axis=-1)
    idx = np.arange(1, n + 1)
    rank = np.max(np.where(nonzero, idx, 0), axis=-1)
    return psd, rank, coeffs, thresh


def membership(
    family: str,
    rank: int,
    z,
    want_preimages: bool = False,
    tol: float = 1e-9,
    float_tol: float = FLOAT_TOL,
) -> MembershipReport:
    """Decide whether ``z`` (real coordinates) lies in the orbit space."""
    family = family.upper()
    validate_family_rank(family, rank)
    zz = _coerce_point(z, rank)
    exact = all(isinstance(v, Fraction) for v in zz)
    h = hermite_at(family, rank, zz)
    if exact:
        verdict = psd_test(h)
        report = MembershipReport(family, rank, zz, verdict.psd, verdict.coeffs, verdict.rank, True)
    else:
        arr = np.array(h, dtype=float)
        psd, rk, coeffs, thresh = _float_verdict(arr, float_tol)
        cleaned = tuple(0.0 if abs(c) <= t else float(c) for c, t in zip(coeffs, thresh))
        report = MembershipReport(family, rank, zz, bool(psd), CharPoly(cleaned), int(rk), False)
    if want_preimages and report.psd:
        pts, res = preimages(family, rank, [float(v) for v in zz], tol=tol)
        report.preimages = pts
        report.residuals = res
    return report


def aberth_roots(coeffs: Sequence[complex], max_iter: int = 200, tol: float = 1e-12) -> np.ndarray:
    """Roots of ``x^n + c_1 x^{n-1} + ... + c_n`` by Aberth-Ehrlich iteration.

    Raises :class:`NumericError` if the residual stays above ``tol`` (relative
    to the coefficient size) after ``max_iter`` sweeps.
    """
    c = np.asarray([1.0] + [complex(v) for v in coeffs], dtype=complex)
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[1]])
    dc = c[:-1] * np.arange(n, 0, -1)
    radius = max(abs(c[-1]) ** (1.0 / n), 1e-3)
    radius = min(radius, 1 + np.max(np.abs(c[1:])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    converged = False
    for it in range(max_iter):
        pv = np.polyval(c, z)
        dv = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * (1.0 + np.abs(z))):
            converged = True
            break
    absz = np.abs(z)
    scale = np.polyval(np.abs(c), absz)
    resid = np.abs(np.polyval(c, z)) / np.maximum(scale, 1e-300)
    if not converged and np.max(resid) > tol:
        raise NumericError(
            "Aberth iteration did not converge",
            {"iterations": max_iter, "max_relative_residual": float(np.max(resid))},
        )
    return z


def _half_disc(r: complex) -> complex:
    """Torus point ``y`` with ``y + 1/y = r`` for ``r`` in [-2, 2]."""
    h = max(-1.0, min(1.0, r.real / 2.0))
    s = 1.0 - h * h
    if s < 0:
        s = 0.0
    return complex(h, math.sqrt(s))


def _telescope(y: Sequence[complex], upto: int) -> List[complex]:
    xs = []
    prev = 1.0 + 0j
    for k in range(upto):
        prev = y[k] * prev
        xs.append(prev)
    return xs


def _normalize(v: complex) -> complex:
    a = abs(v)
    return v / a if a else v


def _candidates(family: str, rank: int, z: Sequence[float]) -> List[List[complex]]:
    n = rank
    if family == "A":
        emb = real_embedding("A", rank)
        zc = emb.to_complex([float(v) for v in z])
        ncoef = rank + 1
        c = [((-1) ** i) * _binom(ncoef, i) * complex(zc[i - 1]) for i in range(1, ncoef)]
        c.append(complex((-1) ** ncoef))
        roots = aberth_roots(c)
        roots = _polish(np.asarray([1.0] + c, dtype=complex), roots)
        ys = [_normalize(r) for r in roots]
        return [_telescope(ys, rank)]
    vals = _coefficient_values(family, rank, [float(v) for v in z])
    roots = aberth_roots([complex(v) for v in vals])
    roots = _polish(np.asarray([1.0] + [complex(v) for v in vals], dtype=complex), roots)
    ys = [_half_disc(complex(r)) for r in roots]
    if family == "C":
        return [_telescope(ys, n)]
    if family == "B":
        base = _telescope(ys, n - 1)
        prev = base[-1] if base else 1.0 + 0j
        root = np.sqrt(ys[n - 1] * prev)
        return [base + [root], base + [-root]]
    out = []
    base = _telescope(ys, n - 2)
    prev = base[-1] if base else 1.0 + 0j
    for yn in (ys[n - 1], 1.0 / ys[n - 1]):
        xm = np.sqrt(ys[n - 2] * prev / yn)
        for s in (1, -1):
            x_nm1 = s * xm
            out.append(base + [x_nm1, yn * x_nm1])
    return out


def _polish(c: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    dc = c[:-1] * np.arange(len(c) - 1, 0, -1)
    z = roots.copy()
    for _ in range(steps):
        pv = np.polyval(c, z)
        dv = np.polyval(dc, z)
        ok = np.abs(dv) > 1e-8
        step = np.where(ok, pv / np.where(ok, dv, 1.0), 0.0)
        z = np.where(np.abs(step) < 1e-6, z - step, z)
    return z


def _euler_jacobian_polys(family: str, rank: int):
    d = root_system(family, rank)
    key = "euler_polys"
    hit = d._cache.get(key)
    if hit is None:
        thetas = fundamental_invariants(d)
        hit = [[t.euler_derivative(k) for t in thetas] for k in range(rank)]
        d._cache[key] = hit
    return hit


def _refine(family: str, rank: int, x: np.ndarray, target: np.ndarray, res: float, steps: int = 8):
    """Gauss-Newton in angle coordinates for ``Theta_R(exp(i phi)) = target``."""
    emb = real_embedding(family, rank)
    polys = _euler_jacobian_polys(family, rank)
    phi = np.angle(x)
    best_x, best_r = x, res
    for _ in range(steps):
        xc = np.exp(1j * phi)
        th = theta_map_float(family, rank, xc[None, :])[0]
        r = target - th
        # d theta_j / d phi_k = i * (x_k d/dx_k theta_j)
        jac_c = np.array([[1j * complex(evaluate_float(polys[k][j], xc)) for k in range(rank)] for j in range(rank)])
        jac = emb.to_real_array(jac_c.T).T
        step, *_ = np.linalg.lstsq(jac, r, rcond=1e-12)
        phi = phi + step
        xn = np.exp(1j * phi)
        rn = float(np.max(np.abs(theta_map_float(family, rank, xn[None, :])[0] - target)))
        if rn < best_r:
            best_x, best_r = xn, rn
        else:
            break
    return best_x, best_r


def preimages(family: str, rank: int, z: Sequence[float], tol: float = 1e-9):
    """Torus points ``x`` with ``Theta(x) = z`` (real coordinates), one per valid branch.

    Returns ``(points, residuals)``; raises :class:`NumericError` if no branch
    reproduces ``z`` within ``tol`` in the max norm.
    """
    family = family.upper()
    validate_family_rank(family, rank)
    target = np.asarray([float(v) for v in z])
    cands = _candidates(family, rank, target)
    arr = np.asarray([[_normalize(complex(v)) for v in c] for c in cands], dtype=complex)
    th = theta_map_float(family, rank, arr)
    res = np.max(np.abs(th - target[None, :]), axis=1)
    for k in range(len(arr)):
        # refine near-miss branches; wrong branches stay far away
        if tol < res[k] <= 1e-4 or res[k] > 1e-13 and res[k] <= tol:
            arr[k], res[k] = _refine(family, rank, arr[k], target, res[k])
    good = []
    resid = []
    for x, r in zip(arr, res):
        if r <= tol and not any(np.allclose(x, g, atol=1e-12) for g in good):
            good.append(x)
            resid.append(float(r))
    if not good:
        raise NumericError(
            "no preimage branch reproduces the point",
            {"point": [float(v) for v in target], "branch_residuals": [float(r) for r in res], "tol": tol},
        )
    return [list(map(complex, g)) for g in good], resid


# --------------------------------------------------------------------------
# rasters
# --------------------------------------------------------------------------

@dataclass
class Raster:
    family: str
    rank: int
    axes: Tuple[int, int]
    xs: np.ndarray
    ys: np.ndarray
    psd: np.ndarray  # shape (len(ys), len(xs))
    rank_H: np.ndarray
    boundary: np.ndarray
    fixed: Tuple[float, ...] = field(default_factory=tuple)

    def points(self):
        for iy, yv in enumerate(self.ys):
            for ix, xv in enumerate(self.xs):
                yield ix, iy, xv, yv


_MAX_RESOLUTION = 4000


def _float_coeff_fn(family: str, rank: int):
    cmap = symmetric_system_coeffs(family, rank, real=True)
    compiled = []
    for p in cmap.coeffs:
        exps = np.array(list(p.terms.keys()), dtype=float).reshape(-1, rank)
        coefs = np.array([float(c) for c in p.terms.values()])
        compiled.append((exps, coefs))

    def f(zs: np.ndarray) -> np.ndarray:
        out = []
        for exps, coefs in compiled:
            if len(coefs) == 0:
                out.append(np.zeros(zs.shape[0]))
                continue
            mon = np.prod(zs[:, None, :] ** exps[None, :, :], axis=-1)
            out.append(mon @ coefs)
        return np.stack(out, axis=-1)

    return f


def hermite_float_batch(family: str, rank: int, zs: np.ndarray) -> np.ndarray:
    """Float Hermite matrices for an ``(npoints, rank)`` array of real points."""
    family = family.upper()
    zs = np.asarray(zs, dtype=float)
    vals = _float_coeff_fn(family, rank)(zs)
    n = vals.shape[1]
    if family == "A":
        cols = [vals[:, i] for i in range(n)]
        monic = chebyshev_to_monomial(cols, 1.0)
    else:
        monic = [vals[:, i] for i in range(n)]
    p = newton_power_sums(monic, 2 * n, n, np.ones(zs.shape[0]))
    a2 = _bound(family) ** 2
    h = np.empty((zs.shape[0], n, n))
    for i in range(n):
        for j in range(n):
            h[:, i, j] = a2 * p[i + j] - p[i + j + 2]
    return h


def region_raster(
    family: str,
    rank: int,
    window: Sequence[float] = (-1.1, 1.1, -1.1, 1.1),
    resolution: int = 100,
    axes: Tuple[int, int] = (0, 1),
    fixed: Optional[Sequence[float]] = None,
    tol: float = FLOAT_TOL,
    workers: Optional[int] = None,
) -> Raster:
    """Membership verdicts on a ``(resolution+1)^2`` grid of nodes (window edges included).

    For rank > 2 the two ``axes`` vary and the other coordinates take the
    values in ``fixed``.
    """
    family = family.upper()
    validate_family_rank(family, rank)
    if resolution < 1 or resolution > _MAX_RESOLUTION:
        raise ValidationError(f"resolution must be in [1, {_MAX_RESOLUTION}]")
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("degenerate raster window")
    if rank == 1:
        raise ValidationError("rasters need rank >= 2")
    if axes[0] == axes[1] or not all(0 <= a < rank for a in axes):
        raise ValidationError("invalid raster axes")
    others = [k for k in range(rank) if k not in axes]
    fixed = list(fixed or [0.0] * len(others))
    if len(fixed) != len(others):
        raise ValidationError(f"need {len(others)} fixed coordinates")
    xs = np.linspace(x0, x1, resolution + 1)
    ys = np.linspace(y0, y1, resolution + 1)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.zeros((gx.size, rank))
    pts[:, axes[0]] = gx.ravel()
    pts[:, axes[1]] = gy.ravel()
    for k, v in zip(others, fixed):
        pts[:, k] = v

    def work(chunk):
        h = hermite_float_batch(family, rank, chunk)
        psd, rk, coeffs, thresh = _float_verdict(h, tol)
        bnd = psd & np.any(np.abs(coeffs) <= thresh, axis=-1)
        return psd, rk, bnd

    chunks = np.array_split(pts, max(1, pts.shape[0] // 20000 + 1))
    nworkers = workers if workers is not None else thread_cap()
    if nworkers > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=nworkers) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    psd = np.concatenate([p[0] for p in parts]).reshape(gx.shape)
    rk = np.concatenate([p[1] for p in parts]).reshape(gx.shape)
    bnd = np.concatenate([p[2] for p in parts]).reshape(gx.shape)
    return Raster(family, rank, tuple(axes), xs, ys, psd, rk, bnd, tuple(fixed))


def thread_cap() -> int:
    import os

    env = os.environ.get("WEYL_TORUS_THREADS")
    cpu = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cpu))
        except ValueError:
            return 1
    return cpu


def sample_exact_torus(rank: int, rng, max_num: int = 7, max_den: int = 7) -> List[CirclePoint]:
    """Random exact torus point via rational tangents ``p/q``."""
    from .exactnum import circle_from_tangent

    pts = []
    for _ in range(rank):
        p = int(rng.integers(-max_num, max_num + 1))
        q = int(rng.integers(1, max_den + 1))
        pts.append(circle_from_tangent(Fraction(p, q)))
    return pts


def sample_float_torus(rank: int, rng, size: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random((size, rank)))
