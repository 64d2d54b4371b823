"""Root systems of types A, B, C, D and their Weyl groups in weight coordinates.

Weyl group elements act on integer exponent vectors written in the basis of
fundamental weights.  The simple reflection ``s_j`` sends a weight ``lam`` to
``lam - lam_j * rho_j``, and ``rho_j`` has weight coordinates given by row
``j`` of the Cartan matrix, so only coordinates along that row change.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import RankError, ResourceLimitError, ValidationError

Vector = Tuple[int, ...]
Matrix = Tuple[Tuple[int, ...], ...]

FAMILIES = ("A", "B", "C", "D")
MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 3}
DEFAULT_ORBIT_CAP = 10**6
DEFAULT_GROUP_CAP = 10**6


@dataclass(frozen=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        fam = str(self.family).upper()
        object.__setattr__(self, "family", fam)
        validate_family_rank(fam, self.rank)

    def __str__(self):
        return f"{self.family}{self.rank}"


def validate_family_rank(family: str, rank, allow_c1: bool = True) -> None:
    if family not in FAMILIES:
        raise RankError(f"unknown family {family!r}; expected one of A, B, C, D")
    if isinstance(rank, bool) or not isinstance(rank, int):
        raise RankError(f"rank must be an integer, got {rank!r}")
    lo = MIN_RANK[family]
    # C1 is kept as a degenerate but well defined case ([-1, 1] orbit space)
    if family == "C" and allow_c1:
        lo = 1
    if rank < lo:
        raise RankError(f"rank {rank} out of range for family {family} (need rank >= {lo})")


def _unit(n: int, i: int, scale=1) -> List[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(scale)
    return v


def _dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True, eq=False)
class RootSystemData:
    """Planche data for one root system plus cached group structure."""

    family: str
    rank: int
    ambient_dim: int
    simple_roots: Tuple[Tuple[Fraction, ...], ...]
    fundamental_weights: Tuple[Tuple[Fraction, ...], ...]
    highest_root: Tuple[Fraction, ...]
    cartan: Matrix
    group_order: int
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        """Number of fundamental invariants (the rank)."""
        return self.rank

    @property
    def weight_matrix(self) -> Tuple[Tuple[Fraction, ...], ...]:
        """Ambient-by-rank matrix whose columns are the fundamental weights."""
        return tuple(
            tuple(self.fundamental_weights[j][i] for j in range(self.rank))
            for i in range(self.ambient_dim)
        )

    @cached_property
    def gram(self) -> Tuple[Tuple[Fraction, ...], ...]:
        """Gram matrix ``<omega_i, omega_j>`` of the fundamental weights."""
        w = self.fundamental_weights
        return tuple(tuple(_dot(w[i], w[j]) for j in range(self.rank)) for i in range(self.rank))

    @cached_property
    def generators(self) -> Tuple[Matrix, ...]:
        return tuple(simple_reflection_matrices(self))

    @cached_property
    def rho_coroot_pairing(self) -> Tuple[Tuple[Fraction, ...], ...]:
        """``<omega_i, rho_j^vee>`` for all i, j (identity for valid data)."""
        out = []
        for w in self.fundamental_weights:
            row = []
            for r in self.simple_roots:
                row.append(2 * _dot(w, r) / _dot(r, r))
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def height_vector(self) -> Tuple[Fraction, ...]:
        """Linear form giving the height of a weight in simple-root coordinates.

        Weight coordinates ``lam`` convert to root coordinates via the inverse
        of the transposed Cartan matrix; every entry of this vector is
        positive, so the form is strictly monotone for the dominance order.
        """
        n = self.rank
        # ρ_j = Σ_k cartan[j][k] ω_k, so root coords c satisfy λ = Aᵀ c.
        a_t = [[Fraction(self.cartan[k][j]) for k in range(n)] for j in range(n)]
        inv = _rational_inverse(a_t)
        return tuple(sum((inv[i][j] for i in range(n)), Fraction(0)) for j in range(n))

    @cached_property
    def sigma(self) -> Tuple[int, ...]:
        """Permutation with ``-omega_i`` in the orbit of ``omega_{sigma(i)}`` (0-based)."""
        out = []
        for i in range(self.rank):
            v = [0] * self.rank
            v[i] = -1
            dom, _ = dominant_representative(self, v)
            j = dom.index(1)
            out.append(j)
        return tuple(out)

    def __repr__(self):
        return f"RootSystemData({self.family}{self.rank}, |W|={self.group_order})"


def build_root_system(t) -> RootSystemData:
    """Return exact planche data for ``t`` (a RootSystemType or ``(family, rank)``)."""
    if not isinstance(t, RootSystemType):
        family, rank = t
        t = RootSystemType(family, rank)
    fam, m = t.family, t.rank
    cache_key = (fam, m)
    if cache_key in _SYSTEMS:
        return _SYSTEMS[cache_key]

    if fam == "A":
        n = m + 1
        roots = [_unit(n, i) for i in range(m)]
        for i in range(m):
            roots[i][i + 1] = Fraction(-1)
        weights = []
        for i in range(1, m + 1):
            w = [Fraction(1 if j < i else 0) - Fraction(i, n) for j in range(n)]
            weights.append(w)
        highest = _unit(n, 0)
        highest[n - 1] = Fraction(-1)
        order = math.factorial(n)
        amb = n
    else:
        n = m
        amb = n
        roots = []
        for i in range(n - 1):
            r = _unit(n, i)
            r[i + 1] = Fraction(-1)
            roots.append(r)
        if fam == "B":
            roots.append(_unit(n, n - 1))
        elif fam == "C":
            roots.append(_unit(n, n - 1, 2))
        else:
            r = _unit(n, n - 2)
            r[n - 1] = Fraction(1)
            roots.append(r)
        weights = []
        for i in range(1, n + 1):
            weights.append([Fraction(1 if j < i else 0) for j in range(n)])
        if fam == "B":
            weights[n - 1] = [Fraction(1, 2)] * n
        elif fam == "D":
            weights[n - 2] = [Fraction(1, 2)] * (n - 1) + [Fraction(-1, 2)]
            weights[n - 1] = [Fraction(1, 2)] * n
        if fam == "C":
            highest = _unit(n, 0, 2)
        elif n == 1:
            highest = _unit(n, 0, 2)
        else:
            highest = _unit(n, 0)
            highest[1] = Fraction(1)
        if fam == "D":
            order = 2 ** (n - 1) * math.factorial(n)
        else:
            order = 2**n * math.factorial(n)
        if fam == "C" and n == 1:
            roots = [_unit(1, 0, 2)]
            weights = [[Fraction(1)]]

    cartan = []
    for ri in roots:
        row = []
        for rj in roots:
            val = 2 * _dot(ri, rj) / _dot(rj, rj)
            if val.denominator != 1:
                raise AssertionError("non-integral Cartan entry")
            row.append(int(val))
        cartan.append(tuple(row))

    data = RootSystemData(
        family=fam,
        rank=m,
        ambient_dim=amb,
        simple_roots=tuple(tuple(r) for r in roots),
        fundamental_weights=tuple(tuple(w) for w in weights),
        highest_root=tuple(highest),
        cartan=tuple(cartan),
        group_order=order,
    )
    _SYSTEMS[cache_key] = data
    return data


_SYSTEMS: Dict[Tuple[str, int], RootSystemData] = {}


def root_system(family: str, rank: int) -> RootSystemData:
    return build_root_system(RootSystemType(family, rank))


def simple_reflection_matrices(d: RootSystemData) -> List[Matrix]:
    """Integer matrices of the simple reflections acting on weight coordinates.

    Column ``j`` of ``s_j`` is ``e_j - (row j of the Cartan matrix)``; every
    other column is the corresponding unit vector.
    """
    n = d.rank
    mats = []
    for j in range(n):
        m = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for k in range(n):
            m[k][j] -= d.cartan[j][k]
        mats.append(tuple(tuple(row) for row in m))
    return mats


def mat_vec(b: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in b)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(b[0])
    inner = len(b)
    return tuple(tuple(sum(row[k] * b[k][c] for k in range(inner)) for c in range(n)) for row in a)


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if r == c else 0 for c in range(n)) for r in range(n))


def transpose(a):
    return tuple(tuple(a[r][c] for r in range(len(a))) for c in range(len(a[0])))


def _rational_inverse(a):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def reflect(d: RootSystemData, alpha: Sequence[int], j: int) -> Vector:
    """Apply the simple reflection ``s_j`` to ``alpha``."""
    a = alpha[j]
    if a == 0:
        return tuple(alpha)
    row = d.cartan[j]
    return tuple(alpha[k] - a * row[k] for k in range(len(alpha)))


def _check_vector(d: RootSystemData, alpha) -> Vector:
    try:
        vec = tuple(int(a) for a in alpha)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"exponent vector must contain integers: {alpha!r}") from exc
    if any(int(a) != a for a in alpha):
        raise ValidationError(f"exponent vector must contain integers: {alpha!r}")
    if len(vec) != d.rank:
        raise ValidationError(f"vector of length {len(vec)} given, rank is {d.rank}")
    return vec


def orbit(d: RootSystemData, alpha, cap: int = DEFAULT_ORBIT_CAP) -> List[Vector]:
    """All distinct images of ``alpha`` under the Weyl group, by BFS over generators."""
    start = _check_vector(d, alpha)
    key = ("orbit", start)
    cached = d._cache.get(key)
    if cached is not None:
        if len(cached) > cap:
            raise ResourceLimitError(f"orbit of {start} exceeds cap {cap}")
        return list(cached)
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for j in range(d.rank):
            w = reflect(d, v, j)
            if w not in seen:
                seen.add(w)
                order.append(w)
                if len(order) > cap:
                    raise ResourceLimitError(f"orbit of {start} exceeds cap {cap}")
                queue.append(w)
    if d.group_order % len(order):
        raise AssertionError("orbit size does not divide the group order")
    d._cache[key] = tuple(order)
    return order


def signed_orbit(d: RootSystemData, alpha, cap: int = DEFAULT_ORBIT_CAP) -> Dict[Vector, int]:
    """Map each orbit element ``B alpha`` to ``det(B)``.

    Returns an empty dict when ``alpha`` has a nontrivial stabilizer containing a
    reflection, i.e. when the alternating sum over the group cancels.
    """
    start = _check_vector(d, alpha)
    signs = {start: 1}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        s = signs[v]
        for j in range(d.rank):
            w = reflect(d, v, j)
            if w in signs:
                if signs[w] != -s:
                    return {}
                continue
            signs[w] = -s
            if len(signs) > cap:
                raise ResourceLimitError(f"orbit of {start} exceeds cap {cap}")
            queue.append(w)
    return signs


def is_dominant(alpha: Sequence[int]) -> bool:
    return all(a >= 0 for a in alpha)


def dominant_representative(d: RootSystemData, alpha) -> Tuple[Vector, int]:
    """Return the dominant element of the orbit of ``alpha`` and the parity of the word used.

    The parity is ``(-1)^length`` of the reflection word applied, which equals
    ``det`` of the group element mapping ``alpha`` to the result.
    """
    v = list(alpha)
    sign = 1
    n = len(v)
    guard = 0
    while True:
        j = next((k for k in range(n) if v[k] < 0), None)
        if j is None:
            return tuple(v), sign
        a = v[j]
        row = d.cartan[j]
        for k in range(n):
            v[k] -= a * row[k]
        sign = -sign
        guard += 1
        if guard > 10**6:
            raise AssertionError("dominant reduction did not terminate")


def stabilizer_order(d: RootSystemData, alpha) -> int:
    return d.group_order // len(orbit(d, alpha))


def group_elements(d: RootSystemData, cap: int = DEFAULT_GROUP_CAP) -> List[Tuple[Matrix, int]]:
    """Every group element as ``(matrix, det)``; raises if the group exceeds ``cap``."""
    if d.group_order > cap:
        raise ResourceLimitError(f"|W({d.family}{d.rank})| = {d.group_order} exceeds cap {cap}")
    cached = d._cache.get("elements")
    if cached is not None:
        return cached
    ident = identity_matrix(d.rank)
    seen = {ident: 1}
    queue = deque([ident])
    gens = d.generators
    while queue:
        g = queue.popleft()
        s = seen[g]
        for b in gens:
            h = mat_mul(b, g)
            if h not in seen:
                seen[h] = -s
                queue.append(h)
    if len(seen) != d.group_order:
        raise AssertionError(f"enumerated {len(seen)} elements, expected {d.group_order}")
    out = list(seen.items())
    d._cache["elements"] = out
    return out


def is_orthogonal_in_weight_basis(d: RootSystemData, b: Matrix) -> bool:
    """Exact check that ``b`` preserves the Gram form of the fundamental weights."""
    g = d.gram
    n = d.rank
    for r in range(n):
        for c in range(n):
            s = Fraction(0)
            for k in range(n):
                if b[k][r] == 0:
                    continue
                for l in range(n):
                    s += b[k][r] * g[k][l] * b[l][c]
            if s != g[r][c]:
                return False
    return True


def integer_det(b: Matrix) -> int:
    n = len(b)
    m = [[Fraction(x) for x in row] for row in b]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return int(det)


def expected_fundamental_orbit_size(family: str, rank: int, i: int) -> int:
    """Closed-form size of the orbit of ``omega_i`` (1-based ``i``)."""
    if family == "A":
        return math.comb(rank + 1, i)
    if family in ("B", "C"):
        return 2**i * math.comb(rank, i)
    if i >= rank - 1:
        return 2 ** (rank - 1)
    return 2**i * math.comb(rank, i)


def unit_vector(n: int, i: int) -> Vector:
    return tuple(1 if k == i else 0 for k in range(n))


def rho_vector(d: RootSystemData) -> Vector:
    """The strongly dominant weight ``delta = omega_1 + ... + omega_n``."""
    return (1,) * d.rank


def iter_dominant(n: int, max_entry: int) -> Iterable[Vector]:
    def rec(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for a in range(max_entry + 1):
            yield from rec(prefix + [a])

    yield from rec([])
