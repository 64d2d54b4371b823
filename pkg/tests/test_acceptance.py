"""The twelve acceptance criteria, each checked against an independent oracle.

Oracles live in ``oracles.py`` and never import the package: Weyl groups are
built as (signed) permutations of epsilon coordinates, Hermite matrices come
straight from the real roots ``y + 1/y`` (or ``Re y`` for type A), and exact
determinants or PSD decisions come from sympy.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import sympy as sp
from sympy.polys.matrices import DomainMatrix

import oracles as O
from conftest import ACCEPTANCE
from weyl_torus import (
    circle_from_tangent,
    hermite_at,
    hermite_matrix,
    membership,
    preimages,
    psd_test,
    root_system,
    theta_map,
)
from weyl_torus.geometry import (
    euler_jacobian,
    m_matrix_at,
    m_matrix_symbolic,
    orthogonality_mc,
    weight_phi,
)
from weyl_torus.golden import golden, registry
from weyl_torus.laurent import anti_invariant, evaluate, orbit_polynomial
from weyl_torus.mpoly import SymMatrixPoly, det_exact

SEED = 42
RANKS = {"A": (2, 3, 4, 5), "B": (2, 3, 4, 5), "C": (2, 3, 4, 5), "D": (3, 4, 5)}


def rng_for(salt: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([SEED, salt])))


def rand_q(rng, lo=-2, hi=2, den=9) -> Fraction:
    q = int(rng.integers(1, den + 1))
    return Fraction(int(rng.integers(lo * q, hi * q + 1)), q)


def rand_tangents(rng, r, num=6, den=6):
    return [Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1))) for _ in range(r)]


def record(k: int, name: str, ok: bool, detail: str, t0: float) -> None:
    detail = f"{detail} [{time.perf_counter() - t0:.1f}s]"
    ACCEPTANCE[k] = (ok, name, detail)
    print(f"{'PASS' if ok else 'FAIL'} {k}. {name}: {detail}")
    assert ok, detail


def sym_det(rows) -> Fraction:
    """Exact determinant through sympy's domain matrices (independent of det_exact)."""
    n = len(rows)
    dm = DomainMatrix([[sp.QQ(int(Fraction(v).numerator), int(Fraction(v).denominator)) for v in r] for r in rows], (n, n), sp.QQ)
    d = dm.det()
    return Fraction(int(d.numerator), int(d.denominator))


def eval_poly_c(p, vals):
    """Evaluate an MPoly at complex (re, im) Fraction pairs, coefficients may be Gaussian."""
    acc = O.ZERO
    for e, c in p.items():
        term = (c.re, c.im) if hasattr(c, "im") else (Fraction(c), Fraction(0))
        for v, k in zip(vals, e):
            for _ in range(k):
                term = O._cmul(term, v)
        acc = O.cadd(acc, term)
    return acc


def theta_oracle(family, r, x, real=True):
    """Exact Theta from the oracle orbits; real coordinates as Fractions."""
    z = [O.orbit_sum(family, r, x, tuple(int(i == k) for i in range(r))) for k in range(r)]
    if not real:
        return z
    out = list(z)
    for a, b in O.conjugate_pairs(family, r):
        za, zb = z[a], z[b]
        out[a] = ((za[0] + zb[0]) / 2, (za[1] + zb[1]) / 2)
        # (za - zb) / (2i)
        out[b] = ((za[1] - zb[1]) / 2, -(za[0] - zb[0]) / 2)
    assert all(v[1] == 0 for v in out)
    return [v[0] for v in out]


# ---------------------------------------------------------------- 1
def test_criterion_01_golden_symbolic_equality():
    t0 = time.perf_counter()
    notes, ok = [], True
    lib_t0 = time.perf_counter()
    scales = {}
    for fam, name in (("C", "C2.H"), ("B", "B2.H")):
        s = hermite_matrix(fam, 2).H.proportionality(SymMatrixPoly(golden(name), 2))
        scales[fam] = s
        good = s is not None and s > 0 and s == registry()[name].scale
        ok &= good
        notes.append(f"{fam}2 H = {s}*printed")
    for fam, name in (("C", "C2.C"), ("B", "B2.C")):
        good = [list(r) for r in hermite_matrix(fam, 2).companion] == golden(name)
        ok &= good
        notes.append(f"{fam}2 C {'equal' if good else 'differs'}")
    lib_time = time.perf_counter() - lib_t0
    ok &= lib_time < 1.0
    # oracle: scaled printed H and printed C describe the roots y + 1/y at torus points
    rng = rng_for(1)
    for fam, name, cname in (("C", "C2.H", "C2.C"), ("B", "B2.H", "B2.C")):
        g, gc = golden(name), golden(cname)
        for _ in range(5):
            x = [O.tangent_point(t) for t in rand_tangents(rng, 2)]
            z = theta_oracle(fam, 2, x)
            want = O.hermite_exact_from_torus(fam, 2, x)
            got = [[scales[fam] * p(*z) for p in row] for row in g]
            ok &= got == want
            roots, _ = O.hermite_roots(fam, 2, x)
            cm = sp.Matrix([[sp.Rational(str(p(*z))) for p in row] for row in gc])
            X = sp.Symbol("X")
            ok &= sp.expand(cm.charpoly(X).as_expr() - sp.prod([X - sp.Rational(str(r)) for r in roots])) == 0
    notes.append(f"library {lib_time:.2f}s; 10 torus points agree with the root oracle")
    record(1, "golden symbolic equality", ok, "; ".join(notes), t0)


# ---------------------------------------------------------------- 2
def test_criterion_02_d4_determinant():
    t0 = time.perf_counter()
    rng = rng_for(2)
    ref = golden("D4.detH")
    scale, ok = None, True
    for _ in range(25):
        z = [rand_q(rng) for _ in range(4)]
        a = sym_det(hermite_at("D", 4, z))
        b = ref(*z)
        if scale is None:
            assert b != 0
            scale = a / b
            ok &= scale > 0
        else:
            ok &= a == scale * b
    # oracle: printed polynomial times the scale is det of the root-built H on the torus
    for _ in range(5):
        x = [O.tangent_point(t) for t in rand_tangents(rng, 4)]
        z = theta_oracle("D", 4, x)
        ok &= ref(*z) * scale == sym_det(O.hermite_exact_from_torus("D", 4, x))
    dt = time.perf_counter() - t0
    ok &= dt < 60
    record(2, "D4 determinant", ok, f"25 rational points + 5 torus points, scale {scale}", t0)


# ---------------------------------------------------------------- 3
def test_criterion_03_forward_soundness():
    t0 = time.perf_counter()
    rng = rng_for(3)
    fails, mismatches, total = 0, 0, 0
    for fam, ranks in RANKS.items():
        for r in ranks:
            for _ in range(100):
                ts = rand_tangents(rng, r)
                x = [circle_from_tangent(t) for t in ts]
                h = hermite_at(fam, r, theta_map(fam, r, x))
                fails += not psd_test(h).psd
                # H = sum (a^2 - r_k^2) v_k v_k^T with |r_k| <= a: PSD by construction
                mismatches += h != O.hermite_exact_from_torus(fam, r, [O.tangent_point(t) for t in ts])
                total += 1
    dt = time.perf_counter() - t0
    ok = fails == 0 and mismatches == 0 and dt < 120
    record(3, "forward soundness", ok, f"{total} exact points, {fails} PSD failures, {mismatches} oracle mismatches", t0)


# ---------------------------------------------------------------- 4
def test_criterion_04_preimage_round_trip():
    t0 = time.perf_counter()
    rng = rng_for(4)
    fails, worst, total = 0, 0.0, 0
    for fam, ranks in RANKS.items():
        for r in ranks:
            xs = np.exp(2j * np.pi * rng.random((100, r)))
            zs = O.theta_float(fam, r, xs)
            for z in zs:
                total += 1
                try:
                    pts, _ = preimages(fam, r, list(z), tol=1e-9)
                except Exception:
                    fails += 1
                    continue
                res = min(float(np.max(np.abs(O.theta_float(fam, r, np.array([p]))[0] - z))) for p in pts)
                worst = max(worst, res)
                fails += res > 1e-9
    record(4, "preimage round trip", fails == 0, f"{total} points, {fails} failures, worst residual {worst:.1e}", t0)


# ---------------------------------------------------------------- 5
def test_criterion_05_a2_vertices():
    t0 = time.perf_counter()
    grid = [k / 6 for k in range(6)]
    ok, notes = True, []
    for (p, want_rank) in golden("A2.vertices"):
        exact = all(isinstance(v, Fraction) for v in p)
        rep = membership("A", 2, list(p)) if exact else membership("A", 2, list(p), float_tol=1e-8)
        # oracle rank: distinct roots strictly inside (-1, 1) at a torus preimage of the vertex
        oracle = None
        for s in grid:
            for t in grid:
                x = np.exp(2j * np.pi * np.array([s, t]))
                if np.max(np.abs(O.theta_float("A", 2, x[None])[0] - np.array(p, dtype=float))) < 1e-12:
                    ys = [np.prod(x ** np.array(mu)) for mu in O.epsilon_exponents("A", 2)]
                    roots = {round(float(y.real), 9) for y in ys}
                    oracle = sum(1 for v in roots if abs(v) < 1 - 1e-9)
        good = rep.psd and rep.rank_H == want_rank and oracle == want_rank
        ok &= good
        notes.append(f"({float(p[0]):.4g},{float(p[1]):.4g}) rank {rep.rank_H} oracle {oracle}")
    record(5, "A2 vertex geometry", ok, "; ".join(notes), t0)


# ---------------------------------------------------------------- 6
def test_criterion_06_quotient_identities():
    t0 = time.perf_counter()
    rng = rng_for(6)
    ok, notes = True, []
    for fam in ("A", "B", "C"):
        q = golden(f"{fam}2.quotient")
        m = m_matrix_symbolic(root_system(fam, 2), real=True)
        count = 0
        while count < 25:
            z = [rand_q(rng) for _ in range(2)]
            if z[1] == 0:
                continue
            count += 1
            ok &= sym_det(hermite_at(fam, 2, z)) == q(*z) * m.det_neg_at(z)
        # oracle on the torus: det(-M~) = det(S) |det J|^2 with J and S from the group itself
        s_det = sym_det(O.invariant_form(fam, 2))
        for _ in range(5):
            x = [O.tangent_point(t) for t in rand_tangents(rng, 2)]
            jd = O.cdet(O.euler_jacobian_exact(fam, 2, x))
            rhs = q(*theta_oracle(fam, 2, x)) * s_det * (jd[0] ** 2 + jd[1] ** 2)
            ok &= sym_det(O.hermite_exact_from_torus(fam, 2, x)) == rhs
        notes.append(f"{fam}2 25+5 points")
    record(6, "quotient identities", ok, "; ".join(notes), t0)


# ---------------------------------------------------------------- 7
def test_criterion_07_phi_golden():
    t0 = time.perf_counter()
    rng = rng_for(7)
    ok, notes = True, []
    for fam, r in (("A", 1), ("A", 2), ("B", 2), ("C", 2)):
        want = golden(f"{fam}{r}.phi")
        good = weight_phi(root_system(fam, r), real=False) == want
        # oracle: the printed polynomial at Theta(x) is Upsilon_rho(x)^2
        for _ in range(5):
            x = [O.tangent_point(t) for t in rand_tangents(rng, r)]
            u = O.anti_invariant(fam, r, x, O.rho(r))
            good &= eval_poly_c(want, theta_oracle(fam, r, x, real=False)) == O._cmul(u, u)
        ok &= good
        notes.append(f"{fam}{r} {'equal' if good else 'differs'}")
    record(7, "phi golden formulas", ok, "; ".join(notes), t0)


# ---------------------------------------------------------------- 8
ORTHO_CASES = (
    ("A", 2, (1, 0), (1, 0), "cosine"),
    ("A", 2, (1, 0), (0, 1), "cosine"),
    ("C", 2, (1, 0), (1, 0), "cosine"),
    ("A", 2, (1, 1), (1, 1), "sine"),
)


def ortho_oracle(fam, r, mu, nu, kind):
    same = tuple(mu) in O.orbit_of(fam, r, tuple(nu))
    if not same:
        return Fraction(0)
    if kind == "cosine":
        return Fraction(1, len(O.orbit_of(fam, r, tuple(mu))))  # |Stab| / |W|
    return Fraction(1, O.group_order(fam, r))


def test_criterion_08_orthogonality():
    t0 = time.perf_counter()
    ok, notes = True, []
    for fam, r, mu, nu, kind in ORTHO_CASES:
        c0 = time.perf_counter()
        est = orthogonality_mc(root_system(fam, r), mu, nu, samples=200_000, seed=SEED, kind=kind)
        target = ortho_oracle(fam, r, mu, nu, kind)
        err = abs(est.estimate - float(target))
        good = err <= 5e-3 and est.target == target and time.perf_counter() - c0 < 30
        ok &= good
        notes.append(f"{fam}{r} {kind} {mu}/{nu}: {est.estimate.real:.4f} vs {target}")
    record(8, "orthogonality", ok, "; ".join(notes), t0)


# ---------------------------------------------------------------- 9
def test_criterion_09_necessary_condition():
    t0 = time.perf_counter()
    rng = rng_for(9)
    worst, ok = -np.inf, True
    for fam, ranks in RANKS.items():
        for r in ranks:
            if r > 4:
                continue
            d = root_system(fam, r)
            S = np.array(O.invariant_form(fam, r), dtype=float)
            for _ in range(100):
                t = rng.random(r)
                x = np.exp(2j * np.pi * t)
                m = np.asarray(m_matrix_at(d, x))
                # oracle: -J^T S conj(J) with J from the oracle orbits
                J = np.zeros((r, r), dtype=complex)
                for j in range(r):
                    orb = np.array(O.orbit_of(fam, r, tuple(int(i == j) for i in range(r))))
                    mons = np.prod(x[None, :] ** orb, axis=1)
                    J[:, j] = (orb * mons[:, None]).sum(axis=0) / len(orb)
                ok &= np.allclose(m, -J.T @ S @ np.conj(J), atol=1e-10)
                ev = np.linalg.eigvalsh(m)
                worst = max(worst, float(ev.max()))
    ok &= worst <= 1e-9
    record(9, "necessary condition", ok, f"largest eigenvalue {worst:.2e}, M matches -J^T S conj(J)", t0)


# ---------------------------------------------------------------- 10
def _eval_lib(p, x):
    v = evaluate(p, x)
    return (v.re, v.im)


def identity_pairs(fam, r, xl, xo, rng):
    """(library, oracle) pairs at one exact torus point."""
    d = root_system(fam, r)
    th = [_eval_lib(orbit_polynomial(d, tuple(int(i == k) for i in range(r))), xl) for k in range(r)]
    ys = [O.monomial(xo, mu) for mu in O.epsilon_exponents(fam, r)]
    out = []

    def th_lin(terms, const=0):
        acc = (Fraction(const), Fraction(0))
        for c, parts in terms:
            v = (Fraction(1), Fraction(0))
            for k in parts:
                v = O._cmul(v, th[k])
            acc = O.cadd(acc, O.cscale(v, c))
        return acc

    n = r
    # orbit sums against elementary symmetric functions of the epsilon monomials
    if fam == "A":
        for i in range(1, n + 1):
            out.append((O.cscale(th[i - 1], math.comb(n + 1, i)), O.elementary(ys, i)))
    else:
        s = [O.cadd(y, (y[0], -y[1])) for y in ys]
        top = n if fam == "C" else (n - 1 if fam == "B" else n - 2)
        for i in range(1, top + 1):
            out.append((O.cscale(th[i - 1], 2**i * math.comb(n, i)), O.elementary(s, i)))
        orb2 = lambda k, c=2: O.orbit_sum(fam, r, xo, tuple(c if j == k else 0 for j in range(n)))  # noqa: E731
        if fam == "B":
            out.append((O.cscale(_eval_lib(orbit_polynomial(d, tuple(2 if j == n - 1 else 0 for j in range(n))), xl), 2**n), O.elementary(s, n)))
            # rewriting of the doubled spin orbit
            rhs = th_lin([(2**n, (n - 1, n - 1))] + [(-math.comb(n, j), (j - 1,)) for j in range(1, n)], -1)
            out.append((rhs, orb2(n - 1)))
        if fam == "D":
            h = 2 ** (n - 1)
            mixed = tuple(1 if j >= n - 2 else 0 for j in range(n))
            if n % 2 == 0:
                r1 = th_lin([(Fraction(h, n), (n - 2, n - 1))] + [(-Fraction(math.comb(n, 2 * j - 1), n), (2 * j - 2,)) for j in range(1, (n - 2) // 2 + 1)])
                tail = [(-math.comb(n, 2 * j), (2 * j - 1,)) for j in range(1, (n - 2) // 2 + 1)]
                r2 = th_lin([(h, (n - 2, n - 2))] + tail, -1)
                r3 = th_lin([(h, (n - 1, n - 1))] + tail, -1)
            else:
                r1 = th_lin([(Fraction(h, n), (n - 2, n - 1))] + [(-Fraction(math.comb(n, 2 * j), n), (2 * j - 1,)) for j in range(1, (n - 3) // 2 + 1)], Fraction(-1, n))
                tail = [(-math.comb(n, 2 * j + 1), (2 * j,)) for j in range(0, (n - 3) // 2 + 1)]
                r2 = th_lin([(h, (n - 2, n - 2))] + tail)
                r3 = th_lin([(h, (n - 1, n - 1))] + tail)
            out += [(r1, O.orbit_sum(fam, r, xo, mixed)), (r2, orb2(n - 2)), (r3, orb2(n - 1))]
    # product recurrence |G beta| orb_alpha orb_beta = sum over the orbit of beta
    alpha = tuple(int(v) for v in rng.integers(0, 3 if r < 4 else 2, r))
    beta = tuple(int(v) for v in rng.integers(0, 3 if r < 4 else 2, r))
    ob = O.orbit_of(fam, r, beta)
    lhs = O.cscale(O._cmul(_eval_lib(orbit_polynomial(d, alpha), xl), _eval_lib(orbit_polynomial(d, beta), xl)), len(ob))
    rhs = O.ZERO
    for b in ob:
        rhs = O.cadd(rhs, O.orbit_sum(fam, r, xo, tuple(a + c for a, c in zip(alpha, b))))
    out.append((lhs, rhs))
    # det J against the Weyl denominator
    J = euler_jacobian(d)
    jl = det_exact([[evaluate(J[k][j], xl) for j in range(r)] for k in range(r)])
    const = Fraction(1)
    for k in range(r):
        const /= len(O.orbit_of(fam, r, tuple(int(i == k) for i in range(r))))
    ud = O.anti_invariant(fam, r, xo, O.rho(r))
    jl = (jl.re, jl.im) if hasattr(jl, "im") else (Fraction(jl), Fraction(0))
    out.append((jl, O.cscale(ud, const)))
    # Upsilon_{-delta} = +-Upsilon_delta and the square is real
    um = _eval_lib(anti_invariant(d, tuple(-1 for _ in range(r))), xl)
    out.append((um, ud) if um == ud else (um, O.cscale(ud, -1)))
    out.append((O._cmul(ud, ud)[1], Fraction(0)))
    return out


def test_criterion_10_identity_suites():
    t0 = time.perf_counter()
    rng = rng_for(10)
    checked, failed = 0, []
    for fam in "ABCD":
        for r in (2, 3, 4):
            if fam == "D" and r < 3:
                continue
            for _ in range(20):
                ts = rand_tangents(rng, r, 4, 4)
                xl = [circle_from_tangent(t) for t in ts]
                xo = [O.tangent_point(t) for t in ts]
                for lib, ora in identity_pairs(fam, r, xl, xo, rng):
                    checked += 1
                    if lib != ora:
                        failed.append(f"{fam}{r}")
    ok = not failed
    record(10, "identity suites", ok, f"{checked} exact identities, failures: {sorted(set(failed)) or 'none'}", t0)


# ---------------------------------------------------------------- 11
EXPECTED_DEGREE = {"A": lambda r: 4 * (r + 1) - 2, "B": lambda r: 3 * r, "C": lambda r: 2 * r, "D": lambda r: 3 * r + 1}


def line_degree(fam, r, rng):
    """Degree of det H restricted to a random line, in sympy's QQ[t]."""
    hm = hermite_matrix(fam, r).H
    t = sp.Symbol("t")
    R = sp.QQ[t]
    line = []
    for _ in range(r):
        a = rand_q(rng, -3, 3, 5)
        b = Fraction(0)
        while b == 0:
            b = rand_q(rng, -3, 3, 5)
        line.append(R.from_sympy(sp.Rational(a.numerator, a.denominator) + t * sp.Rational(b.numerator, b.denominator)))

    def ev(p):
        acc = R.zero
        for e, c in p.items():
            m = R.from_sympy(sp.Rational(c.numerator, c.denominator))
            for li, k in zip(line, e):
                m = m * li**k
            acc += m
        return acc

    n = hm.n
    dm = DomainMatrix([[ev(hm[i, j]) for j in range(n)] for i in range(n)], (n, n), R)
    return R.to_sympy(dm.det()).as_poly(t).degree()


def test_criterion_11_degree_ledger():
    t0 = time.perf_counter()
    rng = rng_for(11)
    ok, notes = True, []
    for fam, ranks in RANKS.items():
        for r in ranks:
            got = max(line_degree(fam, r, rng) for _ in range(2))
            want = EXPECTED_DEGREE[fam](r)
            ok &= got == want
            notes.append(f"{fam}{r}:{got}" + ("" if got == want else f"!={want}"))
    record(11, "degree ledger", ok, " ".join(notes), t0)


# ---------------------------------------------------------------- 12
def random_symmetric(rng, n):
    if rng.random() < 0.5:
        k = int(rng.integers(1, n + 1))
        b = [[Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(n)] for _ in range(k)]
        return [[sum((b[t][i] * b[t][j] for t in range(k)), Fraction(0)) for j in range(n)] for i in range(n)]
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a[i][j] = a[j][i] = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
    shift = int(rng.integers(0, 2 * n + 1))
    for i in range(n):
        a[i][i] += shift
    return a


def test_criterion_12_psd_cross_validation():
    t0 = time.perf_counter()
    rng = rng_for(12)
    disagree, near = 0, 0
    for _ in range(500):
        n = int(rng.integers(2, 7))
        a = random_symmetric(rng, n)
        verdict = psd_test(a).psd
        ev = np.linalg.eigvalsh(np.array(a, dtype=float))
        scale = max(1.0, float(np.abs(ev).max()))
        if abs(ev.min()) <= 1e-9 * scale:
            near += 1
            # the exact verdict is authoritative here; confirm it with sympy
            oracle = sp.Matrix([[sp.Rational(v.numerator, v.denominator) for v in row] for row in a]).is_positive_semidefinite
        else:
            oracle = bool(ev.min() > 0)
        disagree += verdict != oracle
    record(12, "PSD cross validation", disagree == 0, f"500 matrices, {disagree} disagreements, {near} near-singular settled exactly", t0)
