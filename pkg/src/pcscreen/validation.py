"""Input validation helpers for the estimator-facing API."""

from __future__ import annotations

import numpy as np


def check_returns_matrix(X) -> np.ndarray:
    """Coerce X to a validated (n_samples, n_assets) float64 array.

    Accepts anything array-like, including a pandas DataFrame. Requires two
    dimensions, at least 2 rows and 2 columns, and all-finite values.
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D returns matrix, got ndim={arr.ndim}")
    n, p = arr.shape
    if n < 2:
        raise ValueError(f"need at least 2 return observations, got {n}")
    if p < 2:
        raise ValueError(f"need at least 2 assets, got {p}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("returns matrix contains NaN or infinite values")
    return arr


def column_names(X, p: int) -> tuple[str, ...]:
    """Asset names for X: DataFrame columns when present, else x0..x{p-1}."""
    cols = getattr(X, "columns", None)
    if cols is not None and len(cols) == p:
        return tuple(str(c) for c in cols)
    return tuple(f"x{i}" for i in range(p))
