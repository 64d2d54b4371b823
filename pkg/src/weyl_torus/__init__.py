"""Exact orbit spaces of Weyl groups of types A, B, C, D acting on the torus.

The orbit space is described as a basic semi-algebraic set: a real point ``z``
lies in it exactly when a Hermite matrix polynomial ``H(z)`` is positive
semi-definite.
"""

from .errors import (
    InternalError,
    NumericError,
    RankError,
    ResourceLimitError,
    ValidationError,
    WeylTorusError,
)
from .exactnum import CirclePoint, GaussianRational, circle_from_tangent
from .geometry import (
    chebyshev_first,
    chebyshev_second,
    conjecture_check,
    generalized_cosine,
    generalized_sine,
    m_matrix_symbolic,
    orthogonality_mc,
    weight_phi,
)
from .laurent import LaurentPoly, fundamental_invariants, orbit_polynomial
from .mpoly import MPoly, SymMatrixPoly, char_poly, psd_test
from .orbitspace import (
    MembershipReport,
    hermite_at,
    hermite_matrix,
    membership,
    preimages,
    region_raster,
    theta_map,
)
from .rootdata import root_system

__version__ = "0.1.0"


def __getattr__(name):
    # the estimator pulls in scikit-learn, so load it on first use
    if name == "TorusOrbitSpace":
        from .estimator import TorusOrbitSpace

        return TorusOrbitSpace
    raise AttributeError(f"module 'weyl_torus' has no attribute {name!r}")


__all__ = [
    "CirclePoint",
    "GaussianRational",
    "InternalError",
    "LaurentPoly",
    "MPoly",
    "MembershipReport",
    "NumericError",
    "RankError",
    "ResourceLimitError",
    "SymMatrixPoly",
    "TorusOrbitSpace",
    "ValidationError",
    "WeylTorusError",
    "char_poly",
    "chebyshev_first",
    "chebyshev_second",
    "circle_from_tangent",
    "conjecture_check",
    "fundamental_invariants",
    "generalized_cosine",
    "generalized_sine",
    "hermite_at",
    "hermite_matrix",
    "m_matrix_symbolic",
    "membership",
    "orbit_polynomial",
    "orthogonality_mc",
    "preimages",
    "psd_test",
    "region_raster",
    "root_system",
    "theta_map",
    "weight_phi",
]
