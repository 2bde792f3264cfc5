"""scikit-learn style estimator wrapping the detection pipeline.

Lets the detector sit inside the wider ecosystem: ``get_params`` /
``set_params`` / ``clone`` work, ``fit`` takes an (n_samples, n_assets)
returns matrix, and ``transform`` projects returns onto the fitted
components. Column names of a pandas DataFrame are used as tickers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .detector import DetectorConfig, detect
from .spectra import correlation_from_matrix, eigendecompose
from .validation import check_returns_matrix, column_names


class CorrelatedGroupDetector(BaseEstimator):
    """Find groups of highly correlated assets from trailing components.

    Parameters mirror DetectorConfig; see there for semantics.

    Attributes (after fit):
        tickers_: asset names, from DataFrame columns or generated.
        correlation_: (p, p) Pearson correlation of the training returns.
        eigenvalues_: descending eigenvalues of correlation_.
        loadings_: (p, p) array, column k = component k loading vector.
        groups_: list of RelationshipGroup, tightest relationship first.
        mean_, scale_: per-asset mean and standard deviation used by
            transform to standardize.
    """

    def __init__(
        self,
        trailing_count: int = 6,
        eigenvalue_ceiling: float | None = None,
        abs_threshold: float = 0.2,
        rel_threshold: float = 0.5,
        min_group_size: int = 2,
        max_eigenvalue: float = 0.3,
        residual_ceiling: float = 0.25,
        pattern_cos_threshold: float = 0.85,
    ):
        self.trailing_count = trailing_count
        self.eigenvalue_ceiling = eigenvalue_ceiling
        self.abs_threshold = abs_threshold
        self.rel_threshold = rel_threshold
        self.min_group_size = min_group_size
        self.max_eigenvalue = max_eigenvalue
        self.residual_ceiling = residual_ceiling
        self.pattern_cos_threshold = pattern_cos_threshold

    def _config(self) -> DetectorConfig:
        return DetectorConfig(
            trailing_count=self.trailing_count,
            eigenvalue_ceiling=self.eigenvalue_ceiling,
            abs_threshold=self.abs_threshold,
            rel_threshold=self.rel_threshold,
            min_group_size=self.min_group_size,
            max_eigenvalue=self.max_eigenvalue,
            residual_ceiling=self.residual_ceiling,
            pattern_cos_threshold=self.pattern_cos_threshold,
        )

    def fit(self, X, y=None):
        """Run correlation, eigendecomposition and detection on X."""
        arr = check_returns_matrix(X)
        self.tickers_ = column_names(X, arr.shape[1])
        self.n_features_in_ = arr.shape[1]
        self.mean_ = arr.mean(axis=0)
        self.scale_ = arr.std(axis=0, ddof=1)
        cm = correlation_from_matrix(arr.T, self.tickers_)
        ed = eigendecompose(cm)
        self.correlation_ = cm.values
        self.eigenvalues_ = ed.eigenvalues
        self.loadings_ = ed.loadings
        self.decomposition_ = ed
        self.groups_ = detect(ed, self._config())
        return self

    def transform(self, X) -> np.ndarray:
        """Component scores of X under the fitted decomposition.

        Standardizes with the fitted per-asset mean and standard deviation,
        then projects onto the loading columns; column k scores component
        k+1, whose score variance on the training sample is eigenvalues_[k].
        """
        if not hasattr(self, "loadings_"):
            raise RuntimeError("fit the detector before calling transform")
        arr = check_returns_matrix(X)
        if arr.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {arr.shape[1]} assets, fitted on {self.n_features_in_}"
            )
        return ((arr - self.mean_) / self.scale_) @ self.loadings_

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)
