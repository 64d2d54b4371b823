"""Exact reference data transcribed from published worked examples.

Every entry carries a ``source`` tag naming the example it comes from and a
``scale`` field when the printed object is a scalar multiple of ours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict

from .mpoly import MPoly

__all__ = ["GoldenEntry", "registry", "golden", "D4_DETERMINANT"]


@dataclass(frozen=True)
class GoldenEntry:
    name: str
    source: str
    kind: str  # "poly", "matrix", "points"
    nvars: int
    data: object
    scale: Fraction = Fraction(1)

    def value(self):
        if self.kind == "poly":
            return MPoly.parse(self.data, self.nvars)
        if self.kind == "matrix":
            return [[MPoly.parse(e, self.nvars) for e in row] for row in self.data]
        return self.data


D4_DETERMINANT = (
    "4294967296 * (z3 - z4)^2 * (z3 + z4)^2 * (-512 * z1^3 * z3^3 * z4^3 - 432 * z1^4 * z3^4 "
    "- 96 * z1^4 * z3^2 * z4^2 - 432 * z1^4 * z4^4 + 864 * z1^3 * z2 * z3^3 * z4 + 864 * z1^3 "
    "* z2 * z3 * z4^3 + 144 * z1^2 * z2^2 * z3^2 * z4^2 - 96 * z1^2 * z3^4 * z4^2 - 96 * z1^2 "
    "* z3^2 * z4^4 + 864 * z1 * z2 * z3^3 * z4^3 - 432 * z3^4 * z4^4 - 384 * z1^5 * z3 * z4 + "
    "864 * z1^4 * z2 * z3^2 + 864 * z1^4 * z2 * z4^2 - 1440 * z1^3 * z2^2 * z3 * z4 + 96 * "
    "z1^3 * z3^3 * z4 + 96 * z1^3 * z3 * z4^3 - 216 * z1^2 * z2^3 * z3^2 - 216 * z1^2 * z2^3 "
    "* z4^2 + 864 * z1^2 * z2 * z3^4 + 576 * z1^2 * z2 * z3^2 * z4^2 + 864 * z1^2 * z2 * z4^4 "
    "- 1440 * z1 * z2^2 * z3^3 * z4 - 1440 * z1 * z2^2 * z3 * z4^3 - 384 * z1 * z3^5 * z4 + "
    "96 * z1 * z3^3 * z4^3 - 384 * z1 * z3 * z4^5 - 216 * z2^3 * z3^2 * z4^2 + 864 * z2 * "
    "z3^4 * z4^2 + 864 * z2 * z3^2 * z4^4 + 64 * z1^6 - 288 * z1^4 * z2^2 + 192 * z1^4 * z3^2 "
    "+ 192 * z1^4 * z4^2 + 288 * z1^3 * z2 * z3 * z4 + 324 * z1^2 * z2^4 - 1872 * z1^2 * z2^2 "
    "* z3^2 - 1872 * z1^2 * z2^2 * z4^2 + 192 * z1^2 * z3^4 - 240 * z1^2 * z3^2 * z4^2 + 192 "
    "* z1^2 * z4^4 + 2376 * z1 * z2^3 * z3 * z4 + 288 * z1 * z2 * z3^3 * z4 + 288 * z1 * z2 * "
    "z3 * z4^3 + 324 * z2^4 * z3^2 + 324 * z2^4 * z4^2 - 288 * z2^2 * z3^4 - 1872 * z2^2 * "
    "z3^2 * z4^2 - 288 * z2^2 * z4^4 + 64 * z3^6 + 192 * z3^4 * z4^2 + 192 * z3^2 * z4^4 + 64 "
    "* z4^6 - 288 * z1^4 * z2 + 192 * z1^3 * z3 * z4 + 864 * z1^2 * z2^3 - 792 * z1^2 * z2 * "
    "z3^2 - 792 * z1^2 * z2 * z4^2 + 792 * z1 * z2^2 * z3 * z4 + 192 * z1 * z3^3 * z4 + 192 * "
    "z1 * z3 * z4^3 - 486 * z2^5 + 864 * z2^3 * z3^2 + 864 * z2^3 * z4^2 - 288 * z2 * z3^4 - "
    "792 * z2 * z3^2 * z4^2 - 288 * z2 * z4^4 - 48 * z1^4 + 576 * z1^2 * z2^2 - 96 * z1^2 * "
    "z3^2 - 96 * z1^2 * z4^2 - 72 * z1 * z2 * z3 * z4 - 729 * z2^4 + 576 * z2^2 * z3^2 + 576 "
    "* z2^2 * z4^2 - 48 * z3^4 - 96 * z3^2 * z4^2 - 48 * z4^4 + 144 * z1^2 * z2 - 24 * z1 * "
    "z3 * z4 - 432 * z2^3 + 144 * z2 * z3^2 + 144 * z2 * z4^2 + 12 * z1^2 - 126 * z2^2 + 12 * "
    "z3^2 + 12 * z4^2 - 18 * z2 - 1) "
)

_C2_H = (
    ("-2*z1^2 + z2 + 1", "-8*z1^3 + 6*z1*z2 + 2*z1"),
    ("-8*z1^3 + 6*z1*z2 + 2*z1", "-32*z1^4 + 8*z1^2 + 32*z1^2*z2 - 4*z2^2 - 4*z2"),
)

_B2_H = (
    ("-z1^2 + 2*z2^2 - z1", "-4*z1^3 + 12*z1*z2^2 - 6*z1^2 - 2*z1"),
    (
        "-4*z1^3 + 12*z1*z2^2 - 6*z1^2 - 2*z1",
        "-16*z1^4 + 64*z1^2*z2^2 - 32*z2^4 - 32*z1^3 + 32*z1*z2^2 - 20*z1^2 + 8*z2^2 - 4*z1",
    ),
)

_A2_M = (
    ("2/3*(z1^2 + z2^2 - 1)", "2/3*(2*(z1 + I*z2)^2 - 2*(z1 - I*z2))"),
    ("2/3*(2*(z1 - I*z2)^2 - 2*(z1 + I*z2))", "2/3*(z1^2 + z2^2 - 1)"),
)

_S3 = math.sqrt(3) / 2

_ENTRIES = (
    GoldenEntry("C2.H.intro", "introductory C2 example, unscaled Hermite matrix", "matrix", 2, _C2_H, Fraction(8)),
    GoldenEntry("C2.H", "C2 worked example, Hermite matrix printed as 8 times the bracket", "matrix", 2, _C2_H, Fraction(8)),
    GoldenEntry("C2.C", "C2 worked example, companion matrix", "matrix", 2, (("0", "-4*z2"), ("1", "4*z1"))),
    GoldenEntry("B2.H", "B2 worked example, Hermite matrix printed as 16 times the bracket", "matrix", 2, _B2_H, Fraction(16)),
    GoldenEntry("B2.C", "B2 worked example, companion matrix", "matrix", 2, (("0", "-16*z2^2 + 8*z1 + 4"), ("1", "4*z1"))),
    GoldenEntry("D4.detH", "D4 worked example, determinant of the Hermite matrix", "poly", 4, D4_DETERMINANT),
    GoldenEntry("A1.phi", "univariate orthogonality weight", "poly", 1, "4*(z1^2 - 1)"),
    GoldenEntry(
        "A2.phi",
        "A2 orthogonality weight, complex invariant coordinates",
        "poly",
        2,
        "81*z1^2*z2^2 - 108*z1^3 - 108*z2^3 + 162*z1*z2 - 27",
    ),
    GoldenEntry(
        "B2.phi",
        "B2 orthogonality weight",
        "poly",
        2,
        "256*z1^2*z2^2 - 1024*z2^4 - 256*z1^3 + 1536*z1*z2^2 - 512*z1^2 + 256*z2^2 - 256*z1",
    ),
    GoldenEntry(
        "C2.phi",
        "C2 orthogonality weight",
        "poly",
        2,
        "-1024*z1^4 + 256*z1^2*z2^2 + 1536*z1^2*z2 - 256*z2^3 + 256*z1^2 - 512*z2^2 - 256*z2",
    ),
    GoldenEntry("A2.M", "A2 matrix M of the gradient comparison example, real coordinates", "matrix", 2, _A2_M),
    GoldenEntry(
        "A2.quotient", "A2 factor of det H over det(-M)", "poly", 2, "19683/256*(3*z1 + 1)^2*z2^4"
    ),
    GoldenEntry("B2.quotient", "B2 factor of det H over det(-M)", "poly", 2, "16384/9*z2^2"),
    GoldenEntry("C2.quotient", "C2 factor of det H over det(-M)", "poly", 2, "1024/9"),
    GoldenEntry(
        "A2.vertices",
        "A2 orbit space vertices with the rank of H",
        "points",
        2,
        (
            ((Fraction(1), Fraction(0)), 0),
            ((Fraction(-1, 3), Fraction(0)), 0),
            ((-0.5, _S3), 1),
            ((-0.5, -_S3), 1),
        ),
    ),
    GoldenEntry(
        "C2.vertices",
        "C2 orbit space vertices",
        "points",
        2,
        ((Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1)), (Fraction(0), Fraction(-1))),
    ),
)


@lru_cache(maxsize=1)
def registry() -> Dict[str, GoldenEntry]:
    return {e.name: e for e in _ENTRIES}


def golden(name: str):
    """Parsed value of a registry entry."""
    try:
        return registry()[name].value()
    except KeyError:
        raise KeyError(f"no golden entry {name!r}") from None
