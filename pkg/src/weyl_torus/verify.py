"""Verification suites reproducing the checkable claims with fixed seeds."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .exactnum import GaussianRational
from .geometry import (
    euler_jacobian,
    jacobian_det_constant,
    m_matrix_at,
    m_matrix_symbolic,
    orthogonality_mc,
    weight_phi,
    weyl_denominator,
)
from .golden import golden
from .laurent import anti_invariant, evaluate, evaluate_many, fundamental_invariants, orbit_polynomial
from .mpoly import SymMatrixPoly, det_exact, psd_test
from .orbitspace import (
    hermite_at,
    hermite_matrix,
    membership,
    preimages,
    sample_exact_torus,
    sample_float_torus,
    theta_map,
    theta_map_float,
    thread_cap,
)
from .rootdata import MIN_RANK, orbit, root_system

__all__ = ["CheckResult", "SUITES", "run_suite", "criterion", "CRITERIA"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": round(self.seconds, 3)}


def _rng(seed: int, salt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, salt])))


def _rand_rational(rng, lo: int = -2, hi: int = 2, den: int = 12) -> Fraction:
    q = int(rng.integers(1, den + 1))
    p = int(rng.integers(lo * q, hi * q + 1))
    return Fraction(p, q)


def _timed(name: str, fn: Callable[[], tuple]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def _families(max_rank: int, min_rank: int = 2):
    for fam in "ABCD":
        for r in range(max(min_rank, MIN_RANK[fam]), max_rank + 1):
            yield fam, r


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

def _c1(seed: int, quick: bool):
    notes = []
    ok = True
    for fam, name, expect in (("C", "C2.H", Fraction(8)), ("B", "B2.H", Fraction(16))):
        h = hermite_matrix(fam, 2).H
        g = SymMatrixPoly(golden(name), 2)
        s = h.proportionality(g)
        good = s is not None and s > 0 and s == expect
        ok &= good
        notes.append(f"{fam}2 H = {s} * printed")
    for fam, name in (("C", "C2.C"), ("B", "B2.C")):
        comp = [list(r) for r in hermite_matrix(fam, 2).companion]
        good = comp == golden(name)
        ok &= good
        notes.append(f"{fam}2 companion {'equal' if good else 'DIFFERENT'}")
    return ok, "; ".join(notes)


def _c2(seed: int, quick: bool):
    rng = _rng(seed, 2)
    ref = golden("D4.detH")
    scale = None
    npts = 5 if quick else 25
    for k in range(npts):
        z = [_rand_rational(rng) for _ in range(4)]
        a = det_exact(hermite_at("D", 4, z))
        b = ref(*z)
        if scale is None:
            if b == 0:
                continue
            scale = a / b
            if scale <= 0:
                return False, f"non-positive scale {scale}"
        elif a != scale * b:
            return False, f"mismatch at {z}"
    return True, f"{npts} points, scale {scale}"


def _c3(seed: int, quick: bool):
    rng = _rng(seed, 3)
    npts = 10 if quick else 100
    fails = 0
    for fam, r in _families(5):
        for _ in range(npts):
            x = sample_exact_torus(r, rng)
            z = theta_map(fam, r, x)
            if not psd_test(hermite_at(fam, r, z)).psd:
                fails += 1
    return fails == 0, f"{npts} points per family and rank 2-5, {fails} failures"


def _c4(seed: int, quick: bool):
    rng = _rng(seed, 4)
    npts = 10 if quick else 100
    fails = 0
    worst = 0.0
    for fam, r in _families(5):
        xs = sample_float_torus(r, rng, npts)
        zs = theta_map_float(fam, r, xs)
        for z in zs:
            try:
                _, res = preimages(fam, r, z, tol=1e-9)
                worst = max(worst, min(res))
            except Exception:
                fails += 1
    return fails == 0, f"{npts} points per family and rank 2-5, {fails} failures, worst residual {worst:.2e}"


def _c5(seed: int, quick: bool):
    notes = []
    ok = True
    for (pt, want) in golden("A2.vertices"):
        if all(isinstance(v, Fraction) for v in pt):
            rep = membership("A", 2, list(pt))
        else:
            rep = membership("A", 2, list(pt), float_tol=1e-8)
        good = rep.psd and rep.rank_H == want
        ok &= good
        notes.append(f"({float(pt[0]):.4g},{float(pt[1]):.4g}) rank {rep.rank_H}")
    return ok, "; ".join(notes)


_QUOTIENT = {"A": "A2.quotient", "B": "B2.quotient", "C": "C2.quotient"}


def _c6(seed: int, quick: bool):
    rng = _rng(seed, 6)
    npts = 5 if quick else 25
    notes = []
    for fam, key in _QUOTIENT.items():
        m = m_matrix_symbolic(root_system(fam, 2), real=True)
        pre = golden(key)
        for _ in range(npts):
            z = [_rand_rational(rng), _rand_rational(rng)]
            lhs = det_exact(hermite_at(fam, 2, z))
            rhs = pre(*z) * m.det_neg_at(z)
            if lhs != rhs:
                return False, f"{fam}2 mismatch at {z}"
        notes.append(f"{fam}2 ok")
    return True, f"{npts} points each: " + ", ".join(notes)


def _c7(seed: int, quick: bool):
    ok = True
    notes = []
    for fam, r in (("A", 1), ("A", 2), ("B", 2), ("C", 2)):
        p = weight_phi(root_system(fam, r))
        good = p == golden(f"{fam}{r}.phi")
        ok &= good
        notes.append(f"{fam}{r} {'equal' if good else 'DIFFERENT'}")
    return ok, "; ".join(notes)


def _c8(seed: int, quick: bool):
    samples = 20_000 if quick else 200_000
    tol = 2e-2 if quick else 5e-3
    cases = (
        ("A", 2, (1, 0), (1, 0), "cosine"),
        ("A", 2, (1, 0), (0, 1), "cosine"),
        ("C", 2, (1, 0), (1, 0), "cosine"),
        ("A", 2, (1, 1), (1, 1), "sine"),
    )
    notes = []
    ok = True
    for fam, r, mu, nu, kind in cases:
        est = orthogonality_mc(root_system(fam, r), mu, nu, samples, seed, kind)
        err = abs(est.estimate - float(est.target))
        ok &= err <= tol
        notes.append(f"{fam}{r} {kind} {mu},{nu}: {est.estimate.real:.4f} vs {est.target} (err {err:.1e})")
    return ok, "; ".join(notes)


def _c9(seed: int, quick: bool):
    rng = _rng(seed, 9)
    npts = 20 if quick else 100
    worst = -math.inf
    for fam, r in _families(4, 1):
        d = root_system(fam, r)
        for x in sample_float_torus(r, rng, npts):
            worst = max(worst, float(np.linalg.eigvalsh(m_matrix_at(d, list(x))).max()))
    return worst <= 1e-9, f"largest eigenvalue {worst:.2e}"


def _elementary(vals: Sequence, i: int):
    total = 0
    for combo in itertools.combinations(vals, i):
        p = 1
        for v in combo:
            p = p * v
        total = total + p
    return total


def orbit_sum_checks(fam: str, r: int, x) -> List[tuple]:
    """Pairs ``(lhs, rhs)`` of the orbit-sum/elementary-symmetric relations at ``x``."""
    d = root_system(fam, r)
    th = evaluate_many(fundamental_invariants(d), x)
    inv = [v.inverse() for v in x]

    def orb(alpha):
        return evaluate(orbit_polynomial(d, alpha), x)

    out = []
    if fam == "A":
        n = r + 1
        y = [x[0]] + [x[k] * inv[k - 1] for k in range(1, r)] + [inv[r - 1]]
        for i in range(1, n):
            out.append((_elementary(y, i), th[i - 1] * math.comb(n, i)))
        return out
    n = r
    if fam == "C":
        y = [x[0]] + [x[k] * inv[k - 1] for k in range(1, n)]
    elif fam == "B":
        y = [x[0]] + [x[k] * inv[k - 1] for k in range(1, n - 1)] + [x[n - 1] * x[n - 1] * inv[n - 2]]
    else:
        y = [x[0]] + [x[k] * inv[k - 1] for k in range(1, n - 2)]
        y += [x[n - 1] * x[n - 2] * inv[n - 3], x[n - 1] * inv[n - 2]]
    s = [v + v.inverse() for v in y]
    top = n if fam == "C" else (n - 1 if fam == "B" else n - 2)
    for i in range(1, top + 1):
        out.append((_elementary(s, i), th[i - 1] * (2 ** i * math.comb(n, i))))

    def e(*pairs):
        v = [0] * n
        for k, c in pairs:
            v[k] += c
        return tuple(v)

    if fam == "B":
        out.append((_elementary(s, n), orb(e((n - 1, 2))) * 2 ** n))
    elif fam == "D":
        out.append((_elementary(s, n - 1), orb(e((n - 2, 1), (n - 1, 1))) * (2 ** (n - 1) * n)))
        out.append((_elementary(s, n), (orb(e((n - 2, 2))) + orb(e((n - 1, 2)))) * 2 ** (n - 1)))
    return out


def rewriting_lemma_checks(fam: str, r: int, x) -> List[tuple]:
    """The explicit rewritings of orbit polynomials at doubled spin weights."""
    d = root_system(fam, r)
    n = r
    th = evaluate_many(fundamental_invariants(d), x)

    def orb(alpha):
        return evaluate(orbit_polynomial(d, alpha), x)

    def ev(k, c=1):
        return tuple(c if j == k else 0 for j in range(n))

    out = []
    if fam == "B":
        rhs = th[n - 1] * th[n - 1] * 2 ** n - 1
        for j in range(1, n):
            rhs = rhs - th[j - 1] * math.comb(n, j)
        out.append((orb(ev(n - 1, 2)), rhs))
    elif fam == "D":
        mixed = tuple(1 if j >= n - 2 else 0 for j in range(n))
        h = 2 ** (n - 1)
        if n % 2 == 0:
            r1 = th[n - 2] * th[n - 1] * Fraction(h, n)
            for j in range(1, (n - 2) // 2 + 1):
                r1 = r1 - th[2 * j - 2] * Fraction(math.comb(n, 2 * j - 1), n)
            tail = sum((th[2 * j - 1] * math.comb(n, 2 * j) for j in range(1, (n - 2) // 2 + 1)), 0)
            r2 = th[n - 2] * th[n - 2] * h - tail - 1
            r3 = th[n - 1] * th[n - 1] * h - tail - 1
        else:
            r1 = th[n - 2] * th[n - 1] * Fraction(h, n) - Fraction(1, n)
            for j in range(1, (n - 3) // 2 + 1):
                r1 = r1 - th[2 * j - 1] * Fraction(math.comb(n, 2 * j), n)
            tail = sum((th[2 * j] * math.comb(n, 2 * j + 1) for j in range(0, (n - 3) // 2 + 1)), 0)
            r2 = th[n - 2] * th[n - 2] * h - tail
            r3 = th[n - 1] * th[n - 1] * h - tail
        out += [(orb(mixed), r1), (orb(ev(n - 2, 2)), r2), (orb(ev(n - 1, 2)), r3)]
    return out


def recurrence_check(fam: str, r: int, x, alpha, beta) -> tuple:
    """``|G beta| orb_alpha orb_beta`` against ``sum over the orbit of beta of orb_{alpha + beta'}``."""
    from .rootdata import dominant_representative

    d = root_system(fam, r)
    ob = orbit(d, beta)
    mult: Dict[tuple, int] = {}
    for bt in ob:
        lam = dominant_representative(d, tuple(a + b for a, b in zip(alpha, bt)))[0]
        mult[lam] = mult.get(lam, 0) + 1
    keys = list(mult)
    polys = [orbit_polynomial(d, alpha), orbit_polynomial(d, beta)] + [orbit_polynomial(d, k) for k in keys]
    vals = evaluate_many(polys, x)
    lhs = vals[0] * vals[1] * len(ob)
    rhs = sum((v * mult[k] for k, v in zip(keys, vals[2:])), GaussianRational(0, 0))
    return lhs, rhs


def _c10(seed: int, quick: bool):
    rng = _rng(seed, 10)
    npts = 4 if quick else 20
    counts: Dict[str, int] = {}
    for fam, r in _families(4):
        d = root_system(fam, r)
        J = euler_jacobian(d)
        c = jacobian_det_constant(d)
        ud = weyl_denominator(d)
        um = anti_invariant(d, (-1,) * r)
        if um != ud and um != -ud:
            return False, f"{fam}{r}: Upsilon_-delta is not +-Upsilon_delta"
        for _ in range(npts):
            x = sample_exact_torus(r, rng)
            pairs = orbit_sum_checks(fam, r, x) + rewriting_lemma_checks(fam, r, x)
            alpha = tuple(int(v) for v in rng.integers(0, 3, r))
            beta = tuple(int(v) for v in rng.integers(0, 3, r))
            pairs.append(recurrence_check(fam, r, x, alpha, beta))
            jv = [[evaluate(J[k][j], x) for j in range(r)] for k in range(r)]
            uv = evaluate(ud, x)
            pairs.append((det_exact(jv), uv * c))
            pairs.append(((uv * uv).im, 0))
            for lhs, rhs in pairs:
                if lhs != rhs:
                    return False, f"{fam}{r}: identity failed at {x}"
            counts[f"{fam}{r}"] = counts.get(f"{fam}{r}", 0) + len(pairs)
    return True, f"{npts} points per system, {sum(counts.values())} exact identities"


EXPECTED_DEGREE = {
    "A": lambda r: 4 * (r + 1) - 2,
    "B": lambda r: 3 * r,
    "C": lambda r: 2 * r,
    "D": lambda r: 3 * r + 1,
}


def det_degree(fam: str, r: int, seed: int = 0, lines: int = 3) -> int:
    """Total degree of ``det H`` from exact interpolation along random lines."""
    hm = hermite_matrix(fam, r).H
    bound = sum(max(hm[i, j].total_degree() for j in range(hm.n)) for i in range(hm.n))
    rng = _rng(seed, 11 + 100 * r + ord(fam))
    best = 0
    for _ in range(lines):
        a = [_rand_rational(rng, -3, 3, 5) for _ in range(r)]
        b = []
        while len(b) < r:
            v = _rand_rational(rng, -3, 3, 5)
            if v:
                b.append(v)
        ts = list(range(bound + 2))
        coef = [det_exact(hermite_at(fam, r, [ai + t * bi for ai, bi in zip(a, b)])) for t in ts]
        for j in range(1, len(ts)):
            for i in range(len(ts) - 1, j - 1, -1):
                coef[i] = (coef[i] - coef[i - 1]) / (ts[i] - ts[i - j])
        nz = [i for i, c in enumerate(coef) if c != 0]
        best = max(best, nz[-1] if nz else 0)
    return best


def _c11(seed: int, quick: bool):
    notes = []
    ok = True
    for fam, r in _families(4 if quick else 5):
        if fam == "A" and r + 1 < 3:
            continue
        got = det_degree(fam, r, seed)
        want = EXPECTED_DEGREE[fam](r)
        ok &= got == want
        notes.append(f"{fam}{r}:{got}" + ("" if got == want else f"(want {want})"))
    return ok, " ".join(notes)


def random_symmetric(rng, n: int) -> List[List[Fraction]]:
    """Random symmetric rational matrix; half of them are Gram matrices of low rank."""
    if rng.random() < 0.5:
        k = int(rng.integers(1, n + 1))
        b = [[Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(n)] for _ in range(k)]
        return [[sum((b[t][i] * b[t][j] for t in range(k)), Fraction(0)) for j in range(n)] for i in range(n)]
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
            a[i][j] = a[j][i] = v
    shift = Fraction(int(rng.integers(0, 2 * n + 1)))
    for i in range(n):
        a[i][i] += shift
    return a


def _c12(seed: int, quick: bool):
    rng = _rng(seed, 12)
    count = 100 if quick else 500
    disagree = 0
    near = 0
    for _ in range(count):
        n = int(rng.integers(2, 7))
        a = random_symmetric(rng, n)
        exact = psd_test(a).psd
        ev = np.linalg.eigvalsh(np.array(a, dtype=float))
        scale = max(1.0, float(np.abs(ev).max()))
        if abs(ev.min()) <= 1e-9 * scale:
            near += 1
            continue
        if exact != bool(ev.min() > 0):
            disagree += 1
    return disagree == 0, f"{count} matrices, {disagree} disagreements, {near} decided exactly near singularity"


CRITERIA = {
    1: ("golden symbolic equality", _c1),
    2: ("D4 determinant", _c2),
    3: ("forward soundness", _c3),
    4: ("preimage round trip", _c4),
    5: ("A2 vertex geometry", _c5),
    6: ("quotient identities", _c6),
    7: ("phi golden formulas", _c7),
    8: ("orthogonality", _c8),
    9: ("necessary condition", _c9),
    10: ("identity suites", _c10),
    11: ("degree ledger", _c11),
    12: ("PSD cross validation", _c12),
}


def criterion(k: int, seed: int = 42, quick: bool = False) -> CheckResult:
    name, fn = CRITERIA[k]
    return _timed(f"{k}. {name}", lambda: fn(seed, quick))


def _golden_suite(seed: int, quick: bool) -> List[CheckResult]:
    out = [criterion(k, seed, quick) for k in (1, 2, 6, 7)]

    def m_check():
        got = m_matrix_symbolic(root_system("A", 2), real=True)
        want = golden("A2.M")
        return [list(r) for r in got.entries] == want, "A2 M(z) against printed matrix"

    out.append(_timed("A2 M matrix", m_check))

    def c2_vertices():
        bad = [p for p in golden("C2.vertices") if not membership("C", 2, list(p)).psd]
        return not bad, f"{len(golden('C2.vertices'))} vertices inside"

    out.append(_timed("C2 vertices", c2_vertices))
    return out


SUITES: Dict[str, Callable[[int, bool], List[CheckResult]]] = {
    "golden": _golden_suite,
    "soundness": lambda s, q: [criterion(3, s, q)],
    "preimage": lambda s, q: [criterion(4, s, q)],
    "vertices": lambda s, q: [criterion(5, s, q)],
    "quotient": lambda s, q: [criterion(6, s, q)],
    "phi": lambda s, q: [criterion(7, s, q)],
    "ortho": lambda s, q: [criterion(8, s, q)],
    "necessary": lambda s, q: [criterion(9, s, q)],
    "identities": lambda s, q: [criterion(10, s, q)],
    "degree": lambda s, q: [criterion(11, s, q)],
    "psd": lambda s, q: [criterion(12, s, q)],
    "acceptance": lambda s, q: [criterion(k, s, q) for k in sorted(CRITERIA)],
}


def run_suite(name: str, seed: int = 42, quick: bool = False, workers: Optional[int] = None) -> List[CheckResult]:
    """Run a named suite; the acceptance suite spreads its criteria over a thread pool."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    nworkers = workers if workers is not None else thread_cap()
    if name == "acceptance" and nworkers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=nworkers) as ex:
            return list(ex.map(lambda k: criterion(k, seed, quick), sorted(CRITERIA)))
    return SUITES[name](seed, quick)
