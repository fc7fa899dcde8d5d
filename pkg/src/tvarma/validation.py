"""Input validation helpers shared by the estimators and the command line."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array, check_is_fitted  # noqa: F401

from .errors import ConfigError, DataError


def check_series(y, name: str = "y", min_length: int = 1) -> np.ndarray:
    """Return ``y`` as a finite one-dimensional float array."""
    try:
        arr = check_array(np.asarray(y, dtype=float).reshape(-1, 1), ensure_min_samples=min_length)
    except ValueError as exc:
        raise DataError(f"{name}: {exc}") from exc
    return arr.ravel()


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_probability(value, name: str) -> float:
    if not 0 < value < 1:
        raise ConfigError(f"{name} must lie strictly between 0 and 1, got {value!r}")
    return float(value)
