"""Command line interface: ``weyl-torus <subcommand> [options]``.

Exit codes
    0  success; for ``member`` the point is inside or on the boundary
    1  ``verify`` finished and at least one check failed
    2  argument error (bad flag, family/rank combination, malformed point)
    3  ``member`` or ``preimage``: the point is outside the orbit space
       (``preimage`` then prints the membership report)
    4  numeric failure or resource limit; a diagnostic JSON object goes to stdout

JSON schemas
    Every record carries ``"schema": "weyl-torus/1"`` and a ``"kind"`` tag.
    Rationals are strings ``"p/q"``; complex values are ``{"re": .., "im": ..}``
    (exact parts as ``"p/q"`` strings, float parts as numbers).
    A polynomial is a list of terms ``{"exp": [e1, .., en], "coeff": "p/q"}``.

    hermite_matrix     family, rank, bound, H {n, nvars, entries: upper triangle
                       row by row, each a polynomial}, companion (rows of polynomials)
    hermite_value      family, rank, point, H (rows of rationals or floats)
    membership         family, rank, point, exact, psd, status
                       (interior | boundary | outside), rank_H, charpoly
                       (a_1..a_n), optional preimages and residuals
    theta              family, rank, torus (complex list), z (real coordinates)
    preimage           family, rank, point, preimages, angles (multiples of 2 pi),
                       residuals
    chebyshev          family, rank, kind (first | second), alpha, text, terms
    phi                family, rank, coordinates (real | complex), text, terms
    m_matrix           family, rank, coordinates, entries (rows of {text, terms})
    m_value            family, rank, point, M (rows of complex values)
    orthogonality      family, rank, function (cosine | sine), mu, nu, estimate, target, stderr, samples
    verify             suite, seed, passed, checks [{name, passed, detail, seconds}]
    conjecture_check   family, rank, samples, nsd_points, counterexamples, experimental
    error              error, message, details

Points whose first coordinate is negative must be attached to the flag,
as in ``--point=-1/2,0``; otherwise argparse reads them as an option.

CSV (``raster``): header ``z1,..,zn,psd,rank``, one row per grid node.
The environment variable ``WEYL_TORUS_THREADS`` caps worker threads.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import emit
from .errors import NumericError, ResourceLimitError, WeylTorusError
from .exactnum import CirclePoint, circle_from_tangent

__all__ = ["main", "run", "build_parser"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_OUTSIDE = 3
EXIT_NUMERIC = 4


class _UsageError(Exception):
    pass


def _split(text: str) -> List[str]:
    parts = [p.strip() for p in text.split(",")]
    if not text.strip() or any(not p for p in parts):
        raise _UsageError(f"malformed list {text!r}")
    return parts


def _parse_point(text: str, force_float: bool = False) -> list:
    """Rational literals stay exact unless ``force_float``; anything else is a float."""
    out = []
    for p in _split(text):
        if not force_float:
            try:
                out.append(Fraction(p))
                continue
            except (ValueError, ZeroDivisionError):
                pass
        try:
            v = float(p)
        except ValueError:
            raise _UsageError(f"not a number: {p!r}") from None
        if not math.isfinite(v):
            raise _UsageError(f"non-finite coordinate {p!r}")
        out.append(v)
    return out


def _parse_ints(text: str) -> List[int]:
    try:
        return [int(p) for p in _split(text)]
    except ValueError:
        raise _UsageError(f"expected integers, got {text!r}") from None


def _parse_tangents(text: str) -> List[CirclePoint]:
    pts = []
    for p in _split(text):
        if p.lower() in ("inf", "oo"):
            pts.append(CirclePoint(-1, 0))
            continue
        try:
            pts.append(circle_from_tangent(Fraction(p)))
        except (ValueError, ZeroDivisionError):
            raise _UsageError(f"not a rational tangent: {p!r}") from None
    return pts


def _torus_from_angles(text: str) -> List[complex]:
    return [cmath.exp(2j * math.pi * v) for v in map(float, _parse_point(text, force_float=True))]


def _write(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _record(kind: str, args, **fields) -> dict:
    rec = {"kind": kind, "family": args.family, "rank": args.rank}
    rec.update(fields)
    return rec


def _poly_json(p) -> dict:
    return {"text": p.to_string(), "terms": p.to_json()}


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_hermite(args) -> int:
    from .orbitspace import hermite_at, hermite_matrix

    if args.point is None:
        hm = hermite_matrix(args.family, args.rank, method=args.method)
        if args.text:
            lines = []
            for i in range(hm.n):
                for j in range(i, hm.n):
                    lines.append(f"H[{i + 1},{j + 1}] = {hm.H[i, j].to_string()}")
            _write("\n".join(lines) + "\n", args.out)
        else:
            _write(json.dumps(emit.to_jsonable(hm.to_json()), indent=2), args.out)
        return EXIT_OK
    z = _parse_point(args.point, args.float)
    h = hermite_at(args.family, args.rank, z)
    if args.text:
        _write("\n".join("  ".join(str(v) for v in row) for row in h) + "\n", args.out)
    else:
        _write(emit.dumps(_record("hermite_value", args, point=z, H=h)), args.out)
    return EXIT_OK


def _cmd_member(args) -> int:
    from .orbitspace import membership

    z = _parse_point(args.point, args.float)
    rep = membership(args.family, args.rank, z, want_preimages=args.preimages)
    _write(json.dumps(rep.to_json(), indent=2), args.out)
    return EXIT_OK if rep.psd else EXIT_OUTSIDE


def _cmd_theta(args) -> int:
    from .orbitspace import theta_map

    if (args.angles is None) == (args.tangent is None):
        raise _UsageError("give exactly one of --angles or --tangent")
    x = _parse_tangents(args.tangent) if args.tangent is not None else _torus_from_angles(args.angles)
    z = theta_map(args.family, args.rank, x, real=not args.complex)
    rec = _record("theta", args, torus=x, z=z, coordinates="complex" if args.complex else "real")
    _write(emit.dumps(rec), args.out)
    return EXIT_OK


def _cmd_preimage(args) -> int:
    from .orbitspace import membership, preimages

    z = [float(v) for v in _parse_point(args.point, True)]
    rep = membership(args.family, args.rank, z)
    if not rep.psd:
        _write(json.dumps(rep.to_json(), indent=2), args.out)
        return EXIT_OUTSIDE
    pts, res = preimages(args.family, args.rank, z, tol=args.tol)
    angles = [[(cmath.phase(v) / (2 * math.pi)) % 1.0 for v in p] for p in pts]
    rec = _record("preimage", args, point=z, preimages=pts, angles=angles, residuals=res)
    _write(emit.dumps(rec), args.out)
    return EXIT_OK


def _cmd_raster(args) -> int:
    from .orbitspace import region_raster

    window = [float(v) for v in _parse_point(args.window, True)]
    if len(window) != 4:
        raise _UsageError("--window needs x0,x1,y0,y1")
    axes = tuple(k - 1 for k in _parse_ints(args.axes))
    if len(axes) != 2:
        raise _UsageError("--axes needs two coordinate indices")
    fixed = [float(v) for v in _parse_point(args.fixed, True)] if args.fixed else None
    r = region_raster(args.family, args.rank, window, args.resolution, axes, fixed)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            emit.raster_to_csv(r, fh)
    else:
        sys.stdout.write(emit.raster_to_csv(r))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(emit.raster_to_svg(r, cell=args.cell))
    return EXIT_OK


def _cmd_cheb(args) -> int:
    from .geometry import chebyshev_first, chebyshev_second, resolve_system

    d = resolve_system(args.family, args.rank)
    alpha = _parse_ints(args.alpha)
    fn = chebyshev_first if args.kind == "first" else chebyshev_second
    c = fn(d, alpha)
    if args.text:
        _write(c.poly.to_string(), args.out)
        return EXIT_OK
    rec = emit.poly_record("chebyshev", args.family, args.rank, c.poly, chebyshev_kind=args.kind, alpha=list(c.alpha))
    _write(emit.dumps(rec), args.out)
    return EXIT_OK


def _cmd_phi(args) -> int:
    from .geometry import resolve_system, weight_phi

    p = weight_phi(resolve_system(args.family, args.rank), real=args.real)
    if args.text:
        _write(p.to_string(), args.out)
        return EXIT_OK
    coords = "real" if args.real else "complex"
    _write(emit.dumps(emit.poly_record("phi", args.family, args.rank, p, coordinates=coords)), args.out)
    return EXIT_OK


def _cmd_mmatrix(args) -> int:
    from .geometry import m_matrix_at, m_matrix_symbolic, resolve_system

    d = resolve_system(args.family, args.rank)
    if args.tangent is not None or args.angles is not None:
        if args.tangent is not None and args.angles is not None:
            raise _UsageError("give at most one of --angles or --tangent")
        x = _parse_tangents(args.tangent) if args.tangent is not None else _torus_from_angles(args.angles)
        m = m_matrix_at(d, x)
        rows = [list(r) for r in m] if isinstance(m, list) else m.tolist()
        _write(emit.dumps(_record("m_value", args, point=x, M=rows)), args.out)
        return EXIT_OK
    m = m_matrix_symbolic(d, real=not args.complex)
    if args.text:
        lines = [f"M[{i + 1},{j + 1}] = {e.to_string()}" for i, row in enumerate(m.entries) for j, e in enumerate(row)]
        _write("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    rows = [[_poly_json(e) for e in row] for row in m.entries]
    _write(emit.dumps(_record("m_matrix", args, coordinates=m.coordinates, entries=rows)), args.out)
    return EXIT_OK


def _cmd_ortho(args) -> int:
    from .geometry import orthogonality_mc, resolve_system

    d = resolve_system(args.family, args.rank)
    mu, nu = _parse_ints(args.mu), _parse_ints(args.nu)
    est = orthogonality_mc(d, mu, nu, samples=args.samples, seed=args.seed, kind=args.kind)
    body = est.to_json()
    rec = _record("orthogonality", args, function=body.pop("kind"), mu=mu, nu=nu)
    rec.update(body)
    _write(emit.dumps(rec), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    if args.suite not in SUITES:
        raise _UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    results = run_suite(args.suite, seed=args.seed, quick=args.quick)
    ok = all(r.passed for r in results)
    if args.json:
        rec = {"kind": "verify", "suite": args.suite, "seed": args.seed, "passed": ok, "checks": results}
        _write(emit.dumps(rec), args.out)
    else:
        rows = [("PASS" if r.passed else "FAIL", r.name, f"{r.seconds:.2f}s", r.detail) for r in results]
        text = emit.table(rows, ["status", "check", "time", "detail"])
        text += f"\n\nsuite {args.suite} seed {args.seed}: {'PASS' if ok else 'FAIL'}\n"
        _write(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_conjecture(args) -> int:
    from .geometry import conjecture_check, resolve_system

    rep = conjecture_check(resolve_system(args.family, args.rank), samples=args.samples, seed=args.seed, box=args.box)
    rec = {"kind": "conjecture_check"}
    rec.update(rep.to_json())
    _write(emit.dumps(rec), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _system_args(p, rank_default: Optional[int] = None) -> None:
    p.add_argument("--family", "-f", required=True, type=str.upper, choices=["A", "B", "C", "D"])
    p.add_argument("--rank", "-n", type=int, required=rank_default is None, default=rank_default)
    p.add_argument("--out", "-o", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weyl-torus", description="Orbit spaces of Weyl groups acting on the torus.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("hermite", help="Hermite matrix H, symbolic or at a point")
    _system_args(p)
    p.add_argument("--point", help="evaluate at z1,..,zn (rationals stay exact; use --point=-1,.. for a leading minus)")
    p.add_argument("--float", action="store_true", help="force the float path")
    p.add_argument("--text", action="store_true", help="plain text instead of JSON")
    p.add_argument("--method", choices=["newton", "explicit"], default="newton")
    p.set_defaults(fn=_cmd_hermite)

    p = sub.add_parser("member", help="decide membership of a real point")
    _system_args(p)
    p.add_argument("--point", required=True)
    p.add_argument("--float", action="store_true")
    p.add_argument("--preimages", action="store_true", help="also reconstruct torus preimages")
    p.set_defaults(fn=_cmd_member)

    p = sub.add_parser("theta", help="orbit space coordinates of a torus point")
    _system_args(p)
    p.add_argument("--angles", help="angles as multiples of 2 pi, e.g. 0.25,0.5")
    p.add_argument("--tangent", help="exact rational tangents t with x = (1 - t^2 + 2ti)/(1 + t^2)")
    p.add_argument("--complex", action="store_true", help="skip the real embedding")
    p.set_defaults(fn=_cmd_theta)

    p = sub.add_parser("preimage", help="torus preimages of a point of the orbit space")
    _system_args(p)
    p.add_argument("--point", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=_cmd_preimage)

    p = sub.add_parser("raster", help="membership on a 2-D grid, CSV plus optional SVG")
    _system_args(p)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--window", default="-1.1,1.1,-1.1,1.1", help="x0,x1,y0,y1")
    p.add_argument("--axes", default="1,2", help="1-based coordinates on the two axes")
    p.add_argument("--fixed", help="values of the remaining coordinates")
    p.add_argument("--svg", help="also write an SVG image here")
    p.add_argument("--cell", type=float, default=4.0, help="SVG cell size")
    p.set_defaults(fn=_cmd_raster)

    p = sub.add_parser("cheb", help="generalized Chebyshev polynomial")
    _system_args(p)
    p.add_argument("--alpha", required=True, help="weight in the fundamental weight basis")
    p.add_argument("--kind", choices=["first", "second"], default="first")
    p.add_argument("--text", action="store_true")
    p.set_defaults(fn=_cmd_cheb)

    p = sub.add_parser("phi", help="weight polynomial (square of the Weyl denominator)")
    _system_args(p)
    p.add_argument("--real", action="store_true", help="real coordinates instead of complex")
    p.add_argument("--text", action="store_true")
    p.set_defaults(fn=_cmd_phi)

    p = sub.add_parser("mmatrix", help="matrix M of invariant gradient products")
    _system_args(p)
    p.add_argument("--complex", action="store_true")
    p.add_argument("--text", action="store_true")
    p.add_argument("--angles")
    p.add_argument("--tangent")
    p.set_defaults(fn=_cmd_mmatrix)

    p = sub.add_parser("ortho", help="Monte Carlo orthogonality estimate")
    _system_args(p)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--kind", choices=["cosine", "sine"], default="cosine")
    p.add_argument("--samples", type=int, default=200000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_ortho)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="golden")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--quick", action="store_true", help="smaller sample counts")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", "-o")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("conjecture", help="experimental: sample NSD points of M and test membership")
    _system_args(p)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=1.5)
    p.set_defaults(fn=_cmd_conjecture)
    return parser


def _error_json(kind: str, message: str, details=None) -> str:
    return emit.dumps({"kind": "error", "error": kind, "message": message, "details": details or {}})


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "family", None) and args.rank is not None:
            from .rootdata import validate_family_rank

            validate_family_rank(args.family, args.rank)
        return args.fn(args)
    except _UsageError as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"weyl-torus: error: {exc}\n")
        return EXIT_USAGE
    except (NumericError, ResourceLimitError) as exc:
        details = getattr(exc, "details", {})
        sys.stdout.write(_error_json(type(exc).__name__, str(exc), details) + "\n")
        return EXIT_NUMERIC
    except WeylTorusError as exc:
        # ValidationError, RankError and InternalError surface through here
        if isinstance(exc, ValueError):
            sys.stderr.write(parser.format_usage())
            sys.stderr.write(f"weyl-torus: error: {exc}\n")
            return EXIT_USAGE
        sys.stdout.write(_error_json(type(exc).__name__, str(exc)) + "\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"weyl-torus: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
