"""Euler Jacobian, invariant form, the matrix M, Chebyshev polynomials and orthogonality."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .errors import InternalError, ValidationError
from .exactnum import CirclePoint, GaussianRational
from .laurent import (
    LaurentPoly,
    anti_invariant,
    evaluate_float,
    evaluate_many,
    fundamental_invariants,
    orbit_polynomial,
    rewrite_in_fundamental,
)
from .mpoly import MPoly, det_exact, evaluate_mpoly, psd_test
from .rootdata import (
    RootSystemData,
    group_elements,
    is_dominant,
    orbit,
    root_system,
    signed_orbit,
    stabilizer_order,
    unit_vector,
)

__all__ = [
    "InvariantForm",
    "ChebyshevPoly",
    "MMatrix",
    "AlcoveSampler",
    "resolve_system",
    "euler_gradient",
    "euler_jacobian",
    "jacobian_det_constant",
    "invariant_form",
    "m_matrix_entries",
    "m_matrix_at",
    "m_matrix_symbolic",
    "is_nsd_exact",
    "chebyshev_first",
    "chebyshev_second",
    "weyl_denominator",
    "weight_phi",
    "generalized_cosine",
    "generalized_sine",
    "orthogonality_mc",
    "conjecture_check",
]


def resolve_system(d, rank: Optional[int] = None) -> RootSystemData:
    """Accept a :class:`RootSystemData` or a family letter plus rank."""
    if isinstance(d, RootSystemData):
        return d
    if rank is None:
        raise ValidationError("rank is required when a family letter is given")
    return root_system(str(d).upper(), int(rank))


# --------------------------------------------------------------------------
# Euler derivations
# --------------------------------------------------------------------------

def euler_gradient(f: LaurentPoly) -> Tuple[LaurentPoly, ...]:
    """``(x_1 d/dx_1 f, ..., x_n d/dx_n f)``."""
    return tuple(f.euler_derivative(k) for k in range(f.nvars))


def euler_jacobian(d) -> List[List[LaurentPoly]]:
    """``J[k][j] = x_k d theta_j / d x_k``."""
    d = resolve_system(d)
    hit = d._cache.get("euler_jacobian")
    if hit is None:
        cols = [euler_gradient(t) for t in fundamental_invariants(d)]
        hit = [[cols[j][k] for j in range(d.rank)] for k in range(d.rank)]
        d._cache["euler_jacobian"] = hit
    return hit


def jacobian_det_constant(d) -> Fraction:
    """The scalar ``prod |Stab(e_i)| / |G|^n`` relating ``det J`` to the Weyl denominator."""
    d = resolve_system(d)
    num = 1
    for i in range(d.rank):
        num *= stabilizer_order(d, unit_vector(d.rank, i))
    return Fraction(num, d.group_order ** d.rank)


def weyl_denominator(d) -> LaurentPoly:
    d = resolve_system(d)
    return anti_invariant(d, (1,) * d.rank)


# --------------------------------------------------------------------------
# invariant form
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantForm:
    S: Tuple[Tuple[Fraction, ...], ...]

    def is_invariant_under(self, mats) -> bool:
        n = len(self.S)
        for b in mats:
            for r in range(n):
                for c in range(n):
                    v = sum(b[i][r] * self.S[i][j] * b[j][c] for i in range(n) for j in range(n))
                    if v != self.S[r][c]:
                        return False
        return True

    def is_positive_definite(self) -> bool:
        v = psd_test([list(r) for r in self.S])
        return v.psd and v.rank == len(self.S)


def invariant_form(d) -> InvariantForm:
    """``S = (1/|G|) sum_B B^t B`` over the whole group."""
    d = resolve_system(d)
    hit = d._cache.get("invariant_form")
    if hit is not None:
        return hit
    n = d.rank
    acc = [[0] * n for _ in range(n)]
    elems = group_elements(d)
    for b, _ in elems:
        for r in range(n):
            for c in range(r, n):
                acc[r][c] += sum(b[k][r] * b[k][c] for k in range(n))
    g = len(elems)
    s = tuple(tuple(Fraction(acc[min(r, c)][max(r, c)], g) for c in range(n)) for r in range(n))
    form = InvariantForm(s)
    d._cache["invariant_form"] = form
    return form


# --------------------------------------------------------------------------
# the matrix M
# --------------------------------------------------------------------------

def m_matrix_entries(d) -> List[List[LaurentPoly]]:
    """``Mt[i][j] = <grad theta_i, grad hat(theta_j)>_S`` as invariant Laurent polynomials.

    ``hat(theta_j) = theta_{sigma(j)}``, so the second gradient is column ``sigma(j)`` of J.
    """
    d = resolve_system(d)
    hit = d._cache.get("m_tilde")
    if hit is not None:
        return hit
    n = d.rank
    J = euler_jacobian(d)
    S = invariant_form(d).S
    sig = d.sigma
    # SJ[l][j] = sum_k S[l][k] J[k][j]
    zero = LaurentPoly.constant(0, n)
    SJ = [[zero for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for j in range(n):
            acc = zero
            for k in range(n):
                if S[l][k]:
                    acc = acc + J[k][j] * S[l][k]
            SJ[l][j] = acc
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for l in range(n):
                acc = acc + J[l][i] * SJ[l][sig[j]]
            row.append(acc)
        out.append(row)
    d._cache["m_tilde"] = out
    return out


def _jacobian_values(d: RootSystemData, x):
    n = d.rank
    J = euler_jacobian(d)
    flat = [J[k][j] for k in range(n) for j in range(n)]
    exact = all(isinstance(v, (GaussianRational, int, Fraction)) for v in x)
    if exact:
        pts = [v if isinstance(v, CirclePoint) else CirclePoint(v) for v in x]
        vals = evaluate_many(flat, pts)
        return [[vals[k * n + j] for j in range(n)] for k in range(n)], True
    arr = np.asarray([complex(v) for v in x])
    if not np.all(np.isfinite(arr)) or np.any(np.abs(np.abs(arr) - 1.0) > 1e-12):
        raise ValidationError("float torus point is off the unit circle (tolerance 1e-12)")
    jm = np.array([[complex(evaluate_float(J[k][j], arr)) for j in range(n)] for k in range(n)])
    return jm, False


def m_matrix_at(d, x):
    """``Mt(x) = J(x)^t S Jhat(x)`` at a torus point.

    Exact input yields a list of lists of Gaussian rationals, float input a complex array.
    On the torus ``Jhat(x) = -conj(J(x))`` so the result is Hermitian.
    """
    d = resolve_system(d)
    if len(x) != d.rank:
        raise ValidationError(f"torus point has {len(x)} coordinates, rank is {d.rank}")
    jv, exact = _jacobian_values(d, x)
    n = d.rank
    S = invariant_form(d).S
    if not exact:
        s = np.array([[float(v) for v in row] for row in S])
        return jv.T @ s @ (-np.conj(jv))
    jhat = [[-v.conjugate() for v in row] for row in jv]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = GaussianRational(0, 0)
            for k in range(n):
                for l in range(n):
                    if S[k][l]:
                        acc = acc + jv[k][i] * jhat[l][j] * S[k][l]
            row.append(acc)
        out.append(row)
    return out


def _realify_hermitian(a) -> List[List[Fraction]]:
    """Real symmetric ``[[X, -Y], [Y, X]]`` for a Hermitian ``X + iY``."""
    n = len(a)
    out = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            v = a[i][j] if isinstance(a[i][j], GaussianRational) else GaussianRational(a[i][j])
            out[i][j] = v.re
            out[i + n][j + n] = v.re
            out[i][j + n] = -v.im
            out[i + n][j] = v.im
    return out


def is_nsd_exact(a) -> bool:
    """Exact negative semi-definiteness of a Gaussian rational Hermitian matrix."""
    n = len(a)
    for i in range(n):
        for j in range(n):
            u = a[i][j]
            w = a[j][i]
            u = u if isinstance(u, GaussianRational) else GaussianRational(u)
            w = w if isinstance(w, GaussianRational) else GaussianRational(w)
            if u != w.conjugate():
                raise ValidationError(f"matrix is not Hermitian at ({i}, {j})")
    neg = [[-v for v in row] for row in _realify_hermitian(a)]
    return psd_test(neg).psd


@dataclass(frozen=True)
class MMatrix:
    """Polynomial matrix ``M(z)``; Hermitian on real points, not symmetric in general."""

    family: str
    rank: int
    entries: Tuple[Tuple[MPoly, ...], ...]
    coordinates: str

    def __getitem__(self, ij) -> MPoly:
        i, j = ij
        return self.entries[i][j]

    def evaluate(self, z) -> list:
        return [[evaluate_mpoly(p, list(z)) for p in row] for row in self.entries]

    def det_neg_at(self, z):
        """``det(-M(z))`` exactly for rational ``z``."""
        vals = [[-_as_gauss(v) for v in row] for row in self.evaluate(z)]
        det = _as_gauss(det_exact(vals))
        return det.re if det.is_real() else det

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "coordinates": self.coordinates,
            "entries": [[p.to_json() for p in row] for row in self.entries],
        }


def _as_gauss(v):
    if isinstance(v, GaussianRational):
        return v
    return GaussianRational(v, 0)


def m_matrix_symbolic(d, real: bool = True) -> MMatrix:
    """Rewrite each entry of ``Mt`` in the fundamental invariants.

    With ``real=True`` the real-embedding substitution is applied (only changes
    families with conjugate invariant pairs).
    """
    from .orbitspace import real_embedding

    d = resolve_system(d)
    key = ("m_symbolic", real)
    hit = d._cache.get(key)
    if hit is not None:
        return hit
    n = d.rank
    mt = m_matrix_entries(d)
    rows = [[rewrite_in_fundamental(d, mt[i][j]) for j in range(n)] for i in range(n)]
    coords = "complex"
    emb = real_embedding(d.family, n)
    if emb.is_trivial:
        coords = "real"
    elif real:
        subs = emb.substitution()
        rows = [[_subst(p, subs) for p in row] for row in rows]
        coords = "real"
    out = MMatrix(d.family, n, tuple(tuple(r) for r in rows), coords)
    d._cache[key] = out
    return out


def _subst(p: MPoly, subs) -> MPoly:
    q = p.substitute(subs)
    if not isinstance(q, MPoly):
        q = MPoly.constant(q, p.nvars)
    return q


# --------------------------------------------------------------------------
# Chebyshev polynomials and the weight
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChebyshevPoly:
    kind: str
    alpha: Tuple[int, ...]
    poly: MPoly


def _dominant(d: RootSystemData, alpha) -> Tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d.rank:
        raise ValidationError(f"alpha has {len(alpha)} entries, rank is {d.rank}")
    if not is_dominant(alpha):
        raise ValidationError(f"alpha {alpha} is not dominant")
    return alpha


def chebyshev_first(d, alpha) -> ChebyshevPoly:
    d = resolve_system(d)
    alpha = _dominant(d, alpha)
    return ChebyshevPoly("first", alpha, rewrite_in_fundamental(d, orbit_polynomial(d, alpha)))


def character(d, alpha) -> LaurentPoly:
    """Weyl character ``Upsilon_{alpha+delta} / Upsilon_delta``."""
    d = resolve_system(d)
    alpha = _dominant(d, alpha)
    num = anti_invariant(d, tuple(a + 1 for a in alpha))
    try:
        return num.exact_divide(weyl_denominator(d))
    except ValueError as exc:
        raise InternalError(f"Weyl denominator does not divide Upsilon_{alpha}+delta") from exc


def chebyshev_second(d, alpha) -> ChebyshevPoly:
    d = resolve_system(d)
    alpha = _dominant(d, alpha)
    return ChebyshevPoly("second", alpha, rewrite_in_fundamental(d, character(d, alpha)))


def weight_phi(d, real: bool = False) -> MPoly:
    """``phi`` with ``phi(theta) = Upsilon_delta^2``.

    Returned in the complex invariant coordinates by default; ``real=True``
    applies the real-embedding substitution.
    """
    from .orbitspace import real_embedding

    d = resolve_system(d)
    key = ("phi", real)
    hit = d._cache.get(key)
    if hit is not None:
        return hit
    u = weyl_denominator(d)
    phi = rewrite_in_fundamental(d, u * u)
    emb = real_embedding(d.family, d.rank)
    if real and not emb.is_trivial:
        phi = _subst(phi, emb.substitution())
    d._cache[key] = phi
    return phi


# --------------------------------------------------------------------------
# generalized cosines and orthogonality
# --------------------------------------------------------------------------

def _weights_float(d: RootSystemData) -> np.ndarray:
    """Ambient-by-rank float matrix with the fundamental weights as columns."""
    return np.array([[float(v) for v in row] for row in d.weight_matrix])


def _coroot_basis(d: RootSystemData) -> Tuple[Tuple[Fraction, ...], ...]:
    """Ambient-by-rank matrix whose columns are the simple coroots."""
    cols = []
    for r in d.simple_roots:
        nn = sum(a * a for a in r)
        cols.append(tuple(2 * a / nn for a in r))
    return tuple(tuple(cols[j][i] for j in range(d.rank)) for i in range(d.ambient_dim))


def _exp_sum(d: RootSystemData, terms, u) -> np.ndarray:
    """``sum_beta c_beta exp(-2 pi i <W beta, u>)`` for ``u`` of shape ``(..., ambient)``."""
    u = np.asarray(u, dtype=float)
    betas = np.array([b for b, _ in terms], dtype=float)
    coeffs = np.array([c for _, c in terms], dtype=float)
    vecs = betas @ _weights_float(d).T
    phases = u @ vecs.T
    return np.exp(-2j * np.pi * phases) @ coeffs


def generalized_cosine(d, mu, u):
    """``(1/|W|) sum_A e_{A mu}(u)`` with ``e_mu(u) = exp(-2 pi i <mu, u>)``.

    ``mu`` is given in the weight basis; ``u`` is an ambient vector or a stack of them.
    """
    d = resolve_system(d)
    orb = orbit(d, tuple(int(a) for a in mu))
    w = 1.0 / len(orb)
    out = _exp_sum(d, [(b, w) for b in orb], u)
    return complex(out) if np.ndim(out) == 0 else out


def generalized_sine(d, mu, u):
    """``(1/|W|) sum_A det(A) e_{A mu}(u)``; zero on walls."""
    d = resolve_system(d)
    signs = signed_orbit(d, tuple(int(a) for a in mu))
    if not signs:
        u = np.asarray(u, dtype=float)
        return 0j if u.ndim == 1 else np.zeros(u.shape[0], dtype=complex)
    w = 1.0 / d.group_order
    out = _exp_sum(d, [(b, s * w) for b, s in signs.items()], u)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AlcoveSampler:
    """Uniform samples ``u = Q t`` over one period cell of the coroot lattice."""

    basis: Tuple[Tuple[Fraction, ...], ...]
    seed: int

    @classmethod
    def for_system(cls, d, seed: int) -> "AlcoveSampler":
        return cls(_coroot_basis(resolve_system(d)), int(seed))

    def sample(self, count: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        if rng is None:
            rng = np.random.Generator(np.random.Philox(self.seed))
        q = np.array([[float(v) for v in row] for row in self.basis])
        t = rng.random((count, q.shape[1]))
        return t @ q.T


@dataclass(frozen=True)
class OrthogonalityEstimate:
    estimate: complex
    target: Fraction
    stderr: float
    samples: int
    kind: str

    def to_json(self) -> dict:
        return {
            "estimate": {"re": self.estimate.real, "im": self.estimate.imag},
            "target": f"{self.target.numerator}/{self.target.denominator}",
            "stderr": self.stderr,
            "samples": self.samples,
            "kind": self.kind,
        }


def orthogonality_target(d, mu, nu, kind: str = "cosine") -> Fraction:
    d = resolve_system(d)
    mu = tuple(int(a) for a in mu)
    nu = tuple(int(a) for a in nu)
    same = mu in set(orbit(d, nu))
    if kind == "cosine":
        return Fraction(stabilizer_order(d, mu), d.group_order) if same else Fraction(0)
    if kind == "sine":
        if not signed_orbit(d, mu) or not signed_orbit(d, nu):
            return Fraction(0)
        return Fraction(1, d.group_order) if same else Fraction(0)
    raise ValidationError(f"unknown kind {kind!r}")


def orthogonality_mc(
    d,
    mu,
    nu,
    samples: int = 200_000,
    seed: int = 0,
    kind: str = "cosine",
    workers: Optional[int] = None,
) -> OrthogonalityEstimate:
    """Monte Carlo estimate of the normalized inner product of two generalized cosines (or sines)."""
    from .orbitspace import thread_cap

    d = resolve_system(d)
    if samples < 10_000:
        raise ValidationError("at least 10000 samples are required")
    fn = {"cosine": generalized_cosine, "sine": generalized_sine}.get(kind)
    if fn is None:
        raise ValidationError(f"unknown kind {kind!r}")
    sampler = AlcoveSampler.for_system(d, seed)
    nparts = max(1, min(workers or thread_cap(), 16))
    sizes = [samples // nparts + (1 if k < samples % nparts else 0) for k in range(nparts)]
    children = np.random.SeedSequence(seed).spawn(nparts)

    def part(k):
        rng = np.random.Generator(np.random.Philox(children[k]))
        u = sampler.sample(sizes[k], rng)
        v = fn(d, mu, u) * np.conj(fn(d, nu, u))
        return v.sum(), (np.abs(v) ** 2).sum()

    if nparts == 1:
        parts = [part(0)]
    else:
        with ThreadPoolExecutor(max_workers=nparts) as ex:
            parts = list(ex.map(part, range(nparts)))
    total = sum(p[0] for p in parts)
    sq = sum(p[1] for p in parts)
    mean = total / samples
    var = max(sq / samples - abs(mean) ** 2, 0.0)
    return OrthogonalityEstimate(
        complex(mean), orthogonality_target(d, mu, nu, kind), math.sqrt(var / samples), samples, kind
    )


# --------------------------------------------------------------------------
# experimental check of the sufficiency direction
# --------------------------------------------------------------------------

@dataclass
class ConjectureReport:
    family: str
    rank: int
    samples: int
    nsd_points: int
    counterexamples: List[List[float]]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "samples": self.samples,
            "nsd_points": self.nsd_points,
            "counterexamples": self.counterexamples,
            "experimental": True,
        }


def _compile_entries(m: MMatrix):
    """Exponent arrays and complex coefficients for fast float evaluation."""
    out = []
    for row in m.entries:
        crow = []
        for p in row:
            items = list(p.items())
            if not items:
                crow.append((np.zeros((0, m.rank)), np.zeros(0, dtype=complex)))
                continue
            exps = np.array([e for e, _ in items], dtype=float)
            cs = np.array([complex(_as_gauss(c)) for _, c in items])
            crow.append((exps, cs))
        out.append(crow)
    return out


def _float_matrices(compiled, zs: np.ndarray) -> np.ndarray:
    n = len(compiled)
    out = np.zeros((zs.shape[0], n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            exps, cs = compiled[i][j]
            if len(cs):
                mon = np.prod(zs[:, None, :] ** exps[None, :, :], axis=-1)
                out[:, i, j] = mon @ cs
    return out


def conjecture_check(
    d, samples: int = 500, seed: int = 0, box: float = 1.5, tol: float = 1e-9
) -> ConjectureReport:
    """Sample real points, keep those where ``M`` is NSD and test them against the Hermite criterion.

    Experimental: any point with ``M`` NSD that fails membership is reported as a counterexample.
    """
    from .orbitspace import hermite_float_batch, _float_verdict

    d = resolve_system(d)
    m = m_matrix_symbolic(d, real=True)
    rng = np.random.Generator(np.random.Philox(seed))
    zs = rng.uniform(-box, box, size=(samples, d.rank))
    evs = np.linalg.eigvalsh(_float_matrices(_compile_entries(m), zs))
    scale = np.maximum(1.0, np.abs(evs).max(axis=1))
    nsd = [z for z, ev, sc in zip(zs, evs, scale) if ev.max() <= tol * sc]
    bad: List[List[float]] = []
    if nsd:
        arr = np.array(nsd)
        psd, _, _, _ = _float_verdict(hermite_float_batch(d.family, d.rank, arr))
        bad = [list(map(float, z)) for z, ok in zip(arr, np.atleast_1d(psd)) if not ok]
    return ConjectureReport(d.family, d.rank, samples, len(nsd), bad)
