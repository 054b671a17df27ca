"""Scikit-learn style front end for DIEM.

``fit`` calibrates the metric for the training data's dimension and
coordinate range; ``transform`` returns the DIEM matrix between new rows and
the fitted reference rows, ready to feed estimators that accept precomputed
distances.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_matrix
from .calibration import DEFAULT_CALIBRATION_TRIALS, calibrate, diem_from_distance
from .domain import DomainSpec, SeedSpec, SignDomain
from .errors import CalibrationMismatchError, ConstraintViolationError


def _infer_domain(v_min: float, v_max: float) -> DomainSpec:
    if v_min >= 0.0:
        return DomainSpec(v_min, v_max, SignDomain.POSITIVE)
    if v_max <= 0.0:
        return DomainSpec(v_min, v_max, SignDomain.NEGATIVE)
    return DomainSpec(v_min, v_max, SignDomain.ALL)


class DiemTransformer(BaseEstimator, TransformerMixin):
    """Pairwise DIEM against a fitted reference collection.

    Parameters
    ----------
    v_min, v_max : explicit calibration bounds; when None they are taken
        from the observed coordinate range of the fit data.
    trials : Monte Carlo trials used for calibration.
    random_state : master seed for the calibration streams.
    """

    def __init__(self, v_min: float | None = None, v_max: float | None = None,
                 trials: int = DEFAULT_CALIBRATION_TRIALS, random_state: int = 0):
        self.v_min = v_min
        self.v_max = v_max
        self.trials = trials
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        v_min = float(X.min()) if self.v_min is None else float(self.v_min)
        v_max = float(X.max()) if self.v_max is None else float(self.v_max)
        if not v_max > v_min:
            raise ConstraintViolationError(
                f"calibration range is degenerate: [{v_min}, {v_max}]"
            )
        self.domain_ = _infer_domain(v_min, v_max)
        self.calibration_ = calibrate(X.shape[1], self.domain_, trials=self.trials,
                                      seed=SeedSpec(self.random_state))
        self.reference_ = X.copy()
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "calibration_"):
            raise ConstraintViolationError("this transformer is not fitted yet")

    def transform(self, X) -> np.ndarray:
        """(len(X), len(reference)) matrix of DIEM values."""
        self._check_fitted()
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise CalibrationMismatchError(
                f"fitted for {self.n_features_in_} features, got {X.shape[1]}"
            )
        d = np.linalg.norm(X[:, None, :] - self.reference_[None, :, :], axis=2)
        return diem_from_distance(d, self.calibration_)

    def pair_scores(self, A, B) -> np.ndarray:
        """Row-aligned DIEM between two arrays of equal shape."""
        self._check_fitted()
        A = as_matrix(A, "A")
        B = as_matrix(B, "B")
        if A.shape != B.shape:
            raise CalibrationMismatchError(f"shape mismatch: {A.shape} vs {B.shape}")
        if A.shape[1] != self.n_features_in_:
            raise CalibrationMismatchError(
                f"fitted for {self.n_features_in_} features, got {A.shape[1]}"
            )
        return diem_from_distance(np.linalg.norm(A - B, axis=1), self.calibration_)
