"""Model performance metrics."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError, MetricError


def _pair(expected, predicted):
    e = np.asarray(expected, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if e.shape != p.shape:
        raise DimensionError(f"length mismatch: {e.size} expected vs {p.size} predicted")
    return e, p


def chi_squared(expected, predicted) -> float:
    """``sum((E - P)**2 / E)``; lower is better.

    Raises:
        MetricError: if any expected value is zero.
    """
    e, p = _pair(expected, predicted)
    if np.any(e == 0):
        raise MetricError(f"chi-squared is undefined: {int(np.sum(e == 0))} expected value(s) are zero")
    return float(np.sum((e - p) ** 2 / e))


def mse(expected, predicted) -> float:
    e, p = _pair(expected, predicted)
    return float(np.mean((e - p) ** 2))


METRICS = {"chi_squared": chi_squared, "mse": mse}


def per_row_metric(name: str, expected, predicted) -> float:
    """Metric normalised by row count, so sets of different size are comparable.

    ``mse`` is already a mean; ``chi_squared`` is divided by the number of values.
    """
    if name == "mse":
        return mse(expected, predicted)
    if name == "chi_squared":
        return chi_squared(expected, predicted) / np.asarray(expected).size
    raise MetricError(f"unknown metric {name!r}; valid: {', '.join(METRICS)}")
