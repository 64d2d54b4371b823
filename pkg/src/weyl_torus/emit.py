"""JSON, CSV and SVG emitters."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .exactnum import GaussianRational, format_rational
from .mpoly import MPoly

__all__ = [
    "SCHEMA",
    "to_jsonable",
    "dumps",
    "membership_to_json",
    "raster_to_csv",
    "raster_to_svg",
    "poly_record",
]

SCHEMA = "weyl-torus/1"


def to_jsonable(v):
    """Lossless JSON form: rationals as ``"p/q"``, complex values as ``{re, im}``."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, GaussianRational):
        return {"re": format_rational(v.re), "im": format_rational(v.im)}
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, int):
        return v
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, MPoly):
        return v.to_json()
    if isinstance(v, np.ndarray):
        return [to_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if hasattr(v, "to_json"):
        return to_jsonable(v.to_json())
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(record: dict, indent: Optional[int] = 2) -> str:
    out = {"schema": SCHEMA}
    out.update(record)
    return json.dumps(to_jsonable(out), indent=indent)


def membership_to_json(report) -> dict:
    rec = {
        "schema": SCHEMA,
        "kind": "membership",
        "family": report.family,
        "rank": report.rank,
        "point": report.point,
        "exact": report.exact,
        "psd": report.psd,
        "status": report.status,
        "rank_H": report.rank_H,
        "charpoly": list(report.charpoly.coeffs),
    }
    if report.preimages is not None:
        rec["preimages"] = report.preimages
        rec["residuals"] = report.residuals
    return to_jsonable(rec)


def poly_record(kind: str, family: str, rank: int, poly: MPoly, **extra) -> dict:
    rec = {"kind": kind, "family": family, "rank": rank, "text": poly.to_string(), "terms": poly.to_json()}
    rec.update(extra)
    return rec


def raster_to_csv(raster, fh=None) -> str:
    """Rows ``z1,...,zn,psd,rank`` for every grid node."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"z{k + 1}" for k in range(raster.rank)] + ["psd", "rank"])
    others = [k for k in range(raster.rank) if k not in raster.axes]
    for ix, iy, xv, yv in raster.points():
        z = [0.0] * raster.rank
        z[raster.axes[0]] = xv
        z[raster.axes[1]] = yv
        for k, v in zip(others, raster.fixed):
            z[k] = v
        w.writerow([repr(float(c)) for c in z] + [int(raster.psd[iy, ix]), int(raster.rank_H[iy, ix])])
    return buf.getvalue() if fh is None else ""


def raster_to_svg(raster, cell: float = 4.0, inside: str = "#9a9a9a", boundary: str = "#202020") -> str:
    """One rectangle per inside node, a darker fill for boundary nodes."""
    nx, ny = len(raster.xs), len(raster.ys)
    width, height = nx * cell, ny * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="#ffffff"/>',
    ]
    for iy in range(ny):
        y = (ny - 1 - iy) * cell  # y axis points up
        for ix in range(nx):
            if not raster.psd[iy, ix]:
                continue
            fill = boundary if raster.boundary[iy, ix] else inside
            parts.append(f'<rect x="{ix * cell:g}" y="{y:g}" width="{cell:g}" height="{cell:g}" fill="{fill}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def table(rows: Iterable, headers) -> str:
    rows = [list(map(str, r)) for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h)) for i, h in enumerate(headers)]
    line = "  ".join(str(h).ljust(w) for h, w in zip(headers, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)
