"""scikit-learn style transformers mapping each row of ``X`` to a structure statistic.

All four are stateless: ``fit`` only validates ``X`` and records
``n_features_in_``.  Rows are scaled to unit norm first when
``normalize=True``; otherwise they must already be unit vectors.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .arithmetic import LcdParams, lcd, median_threshold, mrlcd, threshold
from .errors import ParameterError
from .geometry import SphereParams

__all__ = ["LCDTransformer", "MRLCDTransformer", "ThresholdTransformer", "MedianThresholdTransformer"]


class _RowStatistic(TransformerMixin, BaseEstimator):
    def _rows(self, X, reset):
        X = check_array(X, dtype=np.float64)
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        if self.normalize:
            norms = np.linalg.norm(X, axis=1)
            if np.any(norms == 0):
                raise ParameterError("cannot normalize an all-zero row")
            X = X / norms[:, None]
        return X

    def fit(self, X, y=None):
        self._rows(X, reset=True)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._rows(X, reset=False)
        return np.array([self._row(x) for x in X], dtype=np.float64)


class LCDTransformer(_RowStatistic):
    """Columns ``[lo, hi]`` of the certified LCD bracket (``hi = inf`` past the horizon)."""

    def __init__(self, L=1.0, theta_max=None, grid_step=1e-2, bisect_tol=1e-7, normalize=True):
        self.L = L
        self.theta_max = theta_max
        self.grid_step = grid_step
        self.bisect_tol = bisect_tol
        self.normalize = normalize

    def _params(self):
        return LcdParams(self.L, self.theta_max, self.grid_step, self.bisect_tol)

    def _row(self, x):
        br = lcd(x, self._params())
        return br.lo, br.hi


class MRLCDTransformer(LCDTransformer):
    """Columns ``[lo, hi]`` of the median block-LCD bracket."""

    def __init__(self, L=1.0, lam=0.125, c0=0.5, c1=0.5, c_spread=None, theta_max=None,
                 grid_step=1e-2, bisect_tol=1e-7, normalize=True):
        super().__init__(L, theta_max, grid_step, bisect_tol, normalize)
        self.lam = lam
        self.c0 = c0
        self.c1 = c1
        self.c_spread = c_spread

    def _row(self, x):
        rep = mrlcd(x, self._params(), SphereParams(self.c0, self.c1, self.c_spread), self.lam)
        return rep.median_value.lo, rep.median_value.hi


class ThresholdTransformer(_RowStatistic):
    """Single column: the threshold of each row under ``Ber(p) - Ber'(p)`` weights."""

    def __init__(self, p=0.1, L=2.0, tol=1e-12, normalize=True):
        self.p = p
        self.L = L
        self.tol = tol
        self.normalize = normalize

    def _row(self, x):
        return (threshold(x, self.p, self.L, self.tol).value,)


class MedianThresholdTransformer(ThresholdTransformer):
    def __init__(self, p=0.1, L=2.0, lam=0.125, c0=0.5, c1=0.5, c_spread=None, tol=1e-12, normalize=True):
        super().__init__(p, L, tol, normalize)
        self.lam = lam
        self.c0 = c0
        self.c1 = c1
        self.c_spread = c_spread

    def _row(self, x):
        sphere = SphereParams(self.c0, self.c1, self.c_spread)
        return (median_threshold(x, self.p, self.L, sphere, self.lam, self.tol).value,)
