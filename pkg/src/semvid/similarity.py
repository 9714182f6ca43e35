"""Similarity kernels between embedded token sets.

Three kernels, all symmetric:

* pooled cosine        cos(sum(X), sum(Y))
* percentile Hausdorff min over both directions of a lower-order statistic
                       of per-point best cosine matches (default l = 50,
                       the median)
* cross sum            sum of all pairwise dot products, which equals the
                       dot product of the pooled sums
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .embedding import EmbeddedSet
from .errors import ZeroNormError


def _vectors(value) -> np.ndarray:
    arr = value.vectors if isinstance(value, EmbeddedSet) else np.asarray(value, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ZeroNormError("similarity kernels need a non-empty (n, dim) vector set")
    return np.asarray(arr, dtype=np.float64)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine undefined for a zero-norm vector")
    return float(np.dot(a, b)) / (na * nb)


def lower_percentile(values: np.ndarray, percentile: float) -> float:
    """Order statistic at index ceil(l/100 * n) - 1 of the ascending sort.

    This is the value with l percent of the entries at or below it; no
    interpolation.
    """
    if not 0.0 < percentile <= 100.0:
        raise ValueError(f"percentile must be in (0, 100], got {percentile}")
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    idx = max(math.ceil(percentile / 100.0 * ordered.shape[0]) - 1, 0)
    return float(ordered[idx])


def sim_pooled(x, y) -> float:
    """Cosine of the two sum-pooled vectors."""
    xs, ys = _vectors(x), _vectors(y)
    return _cosine(xs.sum(axis=0), ys.sum(axis=0))


def sim_hausdorff(x, y, percentile: float = 50.0) -> float:
    """Percentile Hausdorff similarity under cosine point similarity.

    For each point the best cosine match in the other set is taken; the
    directed score is the lower percentile of those maxima, and the result
    is the smaller of the two directions. Singletons reduce to the plain
    cosine of the two points.
    """
    xs, ys = _vectors(x), _vectors(y)
    if xs.shape[0] == 1 and ys.shape[0] == 1:
        return _cosine(xs[0], ys[0])
    best_x, best_y = kernels.directed_max_cosines(xs, ys)
    return min(lower_percentile(best_x, percentile), lower_percentile(best_y, percentile))


def sim_crosssum(x, y) -> float:
    """Sum of dot products over all cross pairs.

    With unit-normalized inputs each term is a cosine. Algebraically this
    equals dot(sum(X), sum(Y)); the pairwise form is kept here so that the
    identity stays a meaningful check.
    """
    xs, ys = _vectors(x), _vectors(y)
    return float(np.sum(xs @ ys.T))
