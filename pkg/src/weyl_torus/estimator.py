"""scikit-learn facade over the float path of :mod:`weyl_torus.orbitspace`."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import NumericError
from .orbitspace import (
    FLOAT_TOL,
    _float_verdict,
    hermite_float_batch,
    preimages,
    theta_map_float,
)
from .rootdata import root_system, validate_family_rank

__all__ = ["TorusOrbitSpace"]


class TorusOrbitSpace(TransformerMixin, BaseEstimator):
    """Orbit map of a Weyl group acting on the torus, as a transformer.

    Rows of ``X`` are torus angles in units of a full turn, so the row
    ``(t_1, .., t_n)`` stands for the point ``x_k = exp(2 pi i t_k)``.
    ``transform`` sends them to real orbit-space coordinates, ``predict``
    labels orbit-space points (1 inside or on the boundary, 0 outside) and
    ``inverse_transform`` returns one preimage per row, as angles in
    ``[0, 1)``; rows outside the orbit space come back as NaN.

    Parameters
    ----------
    family : {"A", "B", "C", "D"}
    rank : int
    tol : float
        Residual tolerance for preimage reconstruction.
    psd_tol : float
        Relative tolerance under which a characteristic coefficient counts as zero.
    """

    def __init__(self, family: str = "C", rank: int = 2, tol: float = 1e-9, psd_tol: float = FLOAT_TOL):
        self.family = family
        self.rank = rank
        self.tol = tol
        self.psd_tol = psd_tol

    def _check_params(self) -> str:
        family = str(self.family).upper()
        validate_family_rank(family, self.rank)
        if not (self.tol > 0 and self.psd_tol > 0):
            raise ValueError("tolerances must be positive")
        return family

    def _validate(self, X, reset: bool) -> np.ndarray:
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.rank:
            raise ValueError(f"X has {X.shape[1]} features, expected rank {self.rank}")
        if reset:
            self.n_features_in_ = X.shape[1]
        return X

    def fit(self, X=None, y=None):
        """Validate parameters; ``X`` is optional and only checked for shape."""
        family = self._check_params()
        if X is not None:
            self._validate(X, reset=True)
        else:
            self.n_features_in_ = self.rank
        self.family_ = family
        self.root_system_ = root_system(family, self.rank)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "root_system_")
        X = self._validate(X, reset=False)
        return theta_map_float(self.family_, self.rank, np.exp(2j * np.pi * X), real=True)

    def predict(self, Z) -> np.ndarray:
        check_is_fitted(self, "root_system_")
        Z = self._validate(Z, reset=False)
        psd, _, _, _ = _float_verdict(hermite_float_batch(self.family_, self.rank, Z), self.psd_tol)
        return psd.astype(np.int64)

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "root_system_")
        Z = self._validate(Z, reset=False)
        inside = self.predict(Z).astype(bool)
        out = np.full(Z.shape, np.nan)
        for i in np.flatnonzero(inside):
            try:
                pts, _ = preimages(self.family_, self.rank, Z[i], tol=self.tol)
            except NumericError:
                continue
            out[i] = (np.angle(np.asarray(pts[0])) / (2 * np.pi)) % 1.0
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "root_system_")
        return np.asarray([f"z{k + 1}" for k in range(self.rank)], dtype=object)
