"""Sparse multivariate polynomials, polynomial matrices and the exact PSD test."""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ValidationError
from .exactnum import GaussianRational, as_rational, format_rational

__all__ = [
    "MPoly",
    "SymMatrixPoly",
    "CharPoly",
    "PSDVerdict",
    "char_poly",
    "psd_test",
    "matrix_poly_power_traces",
    "evaluate_mpoly",
    "companion_matrix",
    "newton_power_sums",
    "det_exact",
    "mat_mul",
]

Exp = Tuple[int, ...]


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, GaussianRational)) and not isinstance(x, bool)


def _norm_coeff(c):
    if isinstance(c, GaussianRational):
        return c.re if c.im == 0 else c
    if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
        return Fraction(c)
    return as_rational(c)


class MPoly:
    """Immutable sparse polynomial in ``z_1..z_n``.

    Coefficients are Fractions, or Gaussian rationals where complex
    coordinates are used internally.
    """

    __slots__ = ("_terms", "nvars")

    def __init__(self, terms: Optional[Mapping] = None, nvars: Optional[int] = None):
        clean: Dict[Exp, object] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(a) for a in e)
                if any(a < 0 for a in e):
                    raise ValidationError(f"negative exponent {e} in a polynomial")
                if nvars is None:
                    nvars = len(e)
                elif len(e) != nvars:
                    raise ValidationError("exponent vectors of unequal length")
                c = _norm_coeff(c)
                v = clean.get(e, 0) + c
                if v:
                    clean[e] = _norm_coeff(v)
                else:
                    clean.pop(e, None)
        if nvars is None:
            raise ValidationError("nvars is required for the zero polynomial")
        self._terms = clean
        self.nvars = nvars

    @classmethod
    def _raw(cls, terms, nvars):
        obj = object.__new__(cls)
        obj._terms = terms
        obj.nvars = nvars
        return obj

    @classmethod
    def var(cls, i: int, nvars: int) -> "MPoly":
        """The variable ``z_{i+1}`` (``i`` is 0-based)."""
        e = [0] * nvars
        e[i] = 1
        return cls._raw({tuple(e): Fraction(1)}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "MPoly":
        c = _norm_coeff(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls._raw({}, nvars)

    @property
    def terms(self) -> Dict[Exp, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coeff(self, e) -> object:
        return self._terms.get(tuple(e), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self):
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def is_real(self) -> bool:
        return all(not isinstance(c, GaussianRational) for c in self._terms.values())

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValidationError("polynomials in different numbers of variables")
            return other
        if _is_scalar(other):
            return MPoly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm_coeff(v)
            else:
                out.pop(e, None)
        return MPoly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw({e: -c for e, c in self._terms.items()}, self.nvars)

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
        if _is_scalar(other):
            if not other:
                return MPoly.zero(self.nvars)
            return MPoly._raw({e: _norm_coeff(c * other) for e, c in self._terms.items()}, self.nvars)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: Dict[Exp, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly._raw({e: _norm_coeff(c) for e, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        return MPoly._raw({e: _norm_coeff(c / other) for e, c in self._terms.items()}, self.nvars)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, MPoly) else other
        if o is None:
            return NotImplemented
        return self.nvars == o.nvars and self._terms == o._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def conjugate(self) -> "MPoly":
        out = {}
        for e, c in self._terms.items():
            out[e] = c.conjugate() if isinstance(c, GaussianRational) else c
        return MPoly._raw(out, self.nvars)

    # evaluation / substitution -------------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return evaluate_mpoly(self, point)

    def substitute(self, values: Sequence) -> object:
        """Replace each variable by an MPoly or scalar (composition)."""
        if len(values) != self.nvars:
            raise ValidationError("wrong number of substitution values")
        powers: List[Dict[int, object]] = [dict() for _ in values]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                if k == 0:
                    cache[k] = 1
                elif k - 1 in cache:
                    cache[k] = cache[k - 1] * values[i]
                else:
                    cache[k] = values[i] ** k
            return cache[k]

        total = 0
        for e, c in self._terms.items():
            term = c
            for i, a in enumerate(e):
                if a:
                    term = term * pw(i, a)
            total = total + term
        return total

    def rename(self, nvars: int, index_map: Sequence[int]) -> "MPoly":
        """Embed into ``nvars`` variables sending variable ``i`` to ``index_map[i]``."""
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                ne[index_map[i]] += a
            out[tuple(ne)] = c
        return MPoly(out, nvars)

    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        if not self._terms:
            return "0"
        names = names or [f"z{i + 1}" for i in range(self.nvars)]
        parts = []
        for e in sorted(self._terms, key=lambda e: (-sum(e), tuple(-a for a in e))):
            c = self._terms[e]
            mono = "*".join(
                (names[i] if a == 1 else f"{names[i]}^{a}") for i, a in enumerate(e) if a
            )
            if isinstance(c, GaussianRational):
                cs = f"({c.re}+({c.im})*I)"
                parts.append(f"+ {cs}*{mono}" if mono else f"+ {cs}")
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append(f"{sign} {body}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"MPoly({self.to_string()})"

    __str__ = to_string

    def to_json(self) -> list:
        """List of ``[exponent, "p/q"]`` pairs (complex coefficients as ``{re, im}``)."""
        out = []
        for e in sorted(self._terms):
            c = self._terms[e]
            if isinstance(c, GaussianRational):
                cj = {"re": format_rational(c.re), "im": format_rational(c.im)}
            else:
                cj = format_rational(c)
            out.append([list(e), cj])
        return out

    @classmethod
    def from_json(cls, data, nvars: int) -> "MPoly":
        terms = {}
        for e, c in data:
            if isinstance(c, dict):
                terms[tuple(e)] = GaussianRational(Fraction(c["re"]), Fraction(c["im"]))
            else:
                terms[tuple(e)] = Fraction(c)
        return cls(terms, nvars)

    @classmethod
    def parse(cls, text: str, nvars: int, prefix: str = "z") -> "MPoly":
        """Parse an expression in ``z1..zn`` with ``+ - * / ^ **`` and integer literals.

        Uses Python's AST, never ``eval``.  ``I`` denotes the imaginary unit.
        """
        src = text.replace("^", "**")
        try:
            tree = ast.parse(src, mode="eval")
        except SyntaxError as exc:
            raise ValidationError(f"cannot parse polynomial: {exc}") from exc

        def conv(node):
            if isinstance(node, ast.Expression):
                return conv(node.body)
            if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
                return MPoly.constant(node.value, nvars)
            if isinstance(node, ast.Name):
                if node.id == "I":
                    return MPoly.constant(GaussianRational(0, 1), nvars)
                if node.id.startswith(prefix) and node.id[len(prefix):].isdigit():
                    i = int(node.id[len(prefix):])
                    if 1 <= i <= nvars:
                        return MPoly.var(i - 1, nvars)
                raise ValidationError(f"unknown symbol {node.id!r}")
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = conv(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp):
                left = conv(node.left)
                if isinstance(node.op, ast.Pow):
                    if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                        raise ValidationError("exponents must be integer literals")
                    if node.right.value < 0:
                        raise ValidationError("negative exponents are not polynomial")
                    return left ** node.right.value
                right = conv(node.right)
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return left * right
                if isinstance(node.op, ast.Div):
                    if not right.is_constant() or not right:
                        raise ValidationError("division only by nonzero constants")
                    return left / right.constant_value()
            raise ValidationError(f"unsupported syntax: {ast.dump(node)[:60]}")

        return conv(tree)


def evaluate_mpoly(p: MPoly, point: Sequence):
    """Evaluate at a point; exact for Fraction / Gaussian inputs, float otherwise."""
    if len(point) != p.nvars:
        raise ValidationError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    pts = []
    for v in point:
        if isinstance(v, (int,)) and not isinstance(v, bool):
            pts.append(Fraction(v))
        elif isinstance(v, str):
            pts.append(Fraction(v))
        else:
            pts.append(v)
    # Horner in the first variable, recursively on the rest.
    return _horner(p._terms, pts, 0)


def _horner(terms: Mapping[Exp, object], pts, var: int):
    if not terms:
        return Fraction(0)
    n = len(pts)
    if var == n:
        return next(iter(terms.values()))
    groups: Dict[int, Dict[Exp, object]] = {}
    for e, c in terms.items():
        groups.setdefault(e[var], {})[e] = c
    degs = sorted(groups, reverse=True)
    x = pts[var]
    acc = 0
    prev = degs[0]
    for k in degs:
        acc = acc * (x ** (prev - k)) if prev != k else acc
        acc = acc + _horner(groups[k], pts, var + 1)
        prev = k
    if prev:
        acc = acc * (x**prev)
    return acc


# matrices ------------------------------------------------------------------

def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(p):
            s = 0
            for k in range(m):
                x = ai[k]
                if x:
                    y = b[k][j]
                    if y:
                        s = s + x * y
            row.append(s)
        out.append(row)
    return out


def _trace(a):
    s = 0
    for i in range(len(a)):
        s = s + a[i][i]
    return s


@dataclass(frozen=True)
class CharPoly:
    """``det(xI - A) = x^n + sum_i (-1)^i a_i x^{n-i}``; ``coeffs`` holds ``a_1..a_n``."""

    coeffs: Tuple

    def __len__(self):
        return len(self.coeffs)

    def monic_coefficients(self) -> List:
        """Coefficients of ``x^n, x^{n-1}, ..., x^0`` of ``det(xI - A)``."""
        return [Fraction(1)] + [((-1) ** (i + 1)) * a for i, a in enumerate(self.coeffs)]


def char_poly(a) -> CharPoly:
    """Faddeev-LeVerrier recurrence; exact for rational entries."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValidationError("characteristic polynomial of a non-square matrix")
    if n == 0:
        return CharPoly(())
    a = [[Fraction(x) if isinstance(x, int) else x for x in row] for row in a]
    # M_1 = I, c_{n-1} = -tr(A); M_k = A M_{k-1} + c_{n-k+1} I
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    monic = [Fraction(1)]
    for k in range(1, n + 1):
        am = mat_mul(a, m)
        t = _trace(am)
        c = Fraction(-t, k) if isinstance(t, int) else -t / k
        monic.append(c)
        if k < n:
            m = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    coeffs = tuple(((-1) ** i) * monic[i] for i in range(1, n + 1))
    return CharPoly(coeffs)


@dataclass(frozen=True)
class PSDVerdict:
    psd: bool
    rank: int
    coeffs: CharPoly

    @property
    def interior(self) -> bool:
        return self.psd and all(c > 0 for c in self.coeffs.coeffs)

    @property
    def boundary(self) -> bool:
        return self.psd and not self.interior


def check_symmetric(a) -> None:
    n = len(a)
    for i in range(n):
        if len(a[i]) != n:
            raise ValidationError("matrix is not square")
        for j in range(i + 1, n):
            if a[i][j] != a[j][i]:
                raise ValidationError(f"matrix is not symmetric at ({i}, {j})")


def psd_test(a) -> PSDVerdict:
    """Exact PSD decision from the signs of the characteristic polynomial coefficients."""
    check_symmetric(a)
    cp = char_poly(a)
    psd = all(c >= 0 for c in cp.coeffs)
    rank = 0
    for i, c in enumerate(cp.coeffs):
        if c != 0:
            rank = i + 1
    return PSDVerdict(psd, rank, cp)


def psd_from_coeffs(coeffs: Sequence[float], tol: float = 0.0) -> Tuple[bool, int]:
    """Float-path verdict from characteristic coefficients with a vanishing tolerance."""
    psd = all(c >= -tol for c in coeffs)
    rank = 0
    for i, c in enumerate(coeffs):
        if abs(c) > tol:
            rank = i + 1
    return psd, rank


def det_exact(a):
    """Determinant by fraction Gaussian elimination (field entries)."""
    n = len(a)
    m = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        for r in range(col + 1, n):
            f = m[r][col]
            if f != 0:
                f = f / p
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def companion_matrix(coeffs: Sequence, one=Fraction(1), zero=Fraction(0)):
    """Companion of ``x^n + c_1 x^{n-1} + ... + c_n``: subdiagonal ones, last column ``-c_n..-c_1``."""
    n = len(coeffs)
    m = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(1, n):
        m[i][i - 1] = one
    for i in range(n):
        m[i][n - 1] = -coeffs[n - 1 - i]
    return m


def newton_power_sums(coeffs: Sequence, kmax: int, n: Optional[int] = None, one=Fraction(1)):
    """Power sums ``p_0..p_kmax`` of the roots of ``x^n + c_1 x^{n-1} + ... + c_n``."""
    n = len(coeffs) if n is None else n
    c = list(coeffs)
    p = [one * n]
    for k in range(1, kmax + 1):
        s = 0
        for i in range(1, min(k - 1, n) + 1):
            s = s + c[i - 1] * p[k - i]
        if k <= n:
            s = s + k * c[k - 1]
        p.append(-s)
    return p


def matrix_poly_power_traces(c, kmax: int, method: str = "explicit"):
    """``trace(C^0) .. trace(C^kmax)`` for a square matrix of MPoly (or scalars).

    ``method="explicit"`` multiplies powers; ``method="newton"`` goes through
    the characteristic polynomial of ``C`` and Newton's identities.
    """
    n = len(c)
    if kmax < 0:
        raise ValidationError("kmax must be nonnegative")
    nv = _matrix_nvars(c)
    one = MPoly.constant(1, nv) if nv is not None else Fraction(1)
    if method == "explicit":
        out = [one * n]
        if kmax == 0:
            return out
        pw = c
        out.append(_trace(pw))
        for _ in range(2, kmax + 1):
            pw = mat_mul(pw, c)
            out.append(_trace(pw))
        return out
    if method == "newton":
        cp = char_poly(c)
        monic = cp.monic_coefficients()
        return newton_power_sums(monic[1:], kmax, n, one)
    raise ValidationError(f"unknown method {method!r}")


def _matrix_nvars(c) -> Optional[int]:
    for row in c:
        for x in row:
            if isinstance(x, MPoly):
                return x.nvars
    return None


class SymMatrixPoly:
    """Symmetric matrix of polynomials stored by its upper triangle."""

    __slots__ = ("n", "nvars", "_entries")

    def __init__(self, entries, nvars: Optional[int] = None):
        n = len(entries)
        upper: Dict[Tuple[int, int], MPoly] = {}
        for i in range(n):
            if len(entries[i]) != n:
                raise ValidationError("matrix is not square")
            for j in range(i, n):
                e = entries[i][j]
                if isinstance(e, MPoly):
                    nvars = e.nvars if nvars is None else nvars
                upper[(i, j)] = e
                if entries[j][i] != e:
                    raise ValidationError(f"polynomial matrix is not symmetric at ({i}, {j})")
        if nvars is None:
            raise ValidationError("cannot infer the number of variables")
        for k, v in upper.items():
            if not isinstance(v, MPoly):
                upper[k] = MPoly.constant(v, nvars)
        self.n = n
        self.nvars = nvars
        self._entries = upper

    def __getitem__(self, ij) -> MPoly:
        i, j = ij
        return self._entries[(i, j) if i <= j else (j, i)]

    def rows(self) -> List[List[MPoly]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def evaluate(self, point) -> List[List[object]]:
        cache = {k: evaluate_mpoly(v, point) for k, v in self._entries.items()}
        return [[cache[(i, j) if i <= j else (j, i)] for j in range(self.n)] for i in range(self.n)]

    def scale(self, s) -> "SymMatrixPoly":
        return SymMatrixPoly([[self[i, j] * s for j in range(self.n)] for i in range(self.n)], self.nvars)

    def __eq__(self, other):
        if not isinstance(other, SymMatrixPoly):
            return NotImplemented
        return self.n == other.n and self._entries == other._entries

    def proportionality(self, other: "SymMatrixPoly"):
        """Return ``s`` with ``self == s * other`` or ``None`` if not proportional."""
        if self.n != other.n:
            return None
        s = None
        for k, v in self._entries.items():
            w = other._entries[k]
            if not w:
                if v:
                    return None
                continue
            e, c = next(iter(w.items()))
            cand = v.coeff(e) / c
            if s is None:
                s = cand
            elif s != cand:
                return None
        if s is None or not all(self._entries[k] == other._entries[k] * s for k in self._entries):
            return None
        return s

    def determinant_at(self, point):
        return det_exact(self.evaluate(point))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "nvars": self.nvars,
            "entries": [
                {"i": i + 1, "j": j + 1, "terms": self[i, j].to_json()}
                for i in range(self.n)
                for j in range(i, self.n)
            ],
        }

    @classmethod
    def from_json(cls, data) -> "SymMatrixPoly":
        n, nv = data["n"], data["nvars"]
        rows = [[None] * n for _ in range(n)]
        for ent in data["entries"]:
            p = MPoly.from_json(ent["terms"], nv)
            i, j = ent["i"] - 1, ent["j"] - 1
            rows[i][j] = p
            rows[j][i] = p
        return cls(rows, nv)
