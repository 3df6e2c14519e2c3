"""
Descriptive circular statistics: mean direction and resultant length,
circular median and quartiles, circular correlation.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from .core import TWO_PI, wrap_angles
from .errors import ArgumentError, DataError, DegenerateDataError

logger = logging.getLogger(__name__)

# Mean arc distances closer than this count as ties.
TIE_TOL = 1e-12
# Per-observation sine dispersion below this makes the correlation undefined.
MIN_SINE_DISPERSION = 1e-20
# Candidates scored per block when searching for the median.
MEDIAN_BLOCK = 1024


@dataclass(frozen=True)
class CircularSummary:
    mean_direction: float
    resultant_length: float
    median: float
    q1: float
    q3: float
    n_obs: int

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def _column(values) -> np.ndarray:
    column = np.asarray(values, dtype=np.float64).reshape(-1)
    if column.size < 1:
        raise DataError("circular statistics need at least one observation")
    if not np.all(np.isfinite(column)):
        raise DataError("angles contain non-finite values")
    return wrap_angles(column)


def arc_distance(a, b) -> np.ndarray:
    """Shortest distance along the circle, in [0, pi]."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def mean_direction(values) -> float:
    """arg of sum e^{i theta}, in [0, 2pi)."""
    column = _column(values)
    total = np.sum(np.exp(1j * column))
    if abs(total) < 1e-14 * column.size:
        logger.warning("resultant length is zero; mean direction reported as 0")
        return 0.0
    return float(wrap_angles(np.angle(total)))


def resultant_length(values) -> float:
    """|sum e^{i theta}| / n, in [0, 1]."""
    column = _column(values)
    return float(min(abs(np.mean(np.exp(1j * column))), 1.0))


def circular_median(values) -> float:
    """
    Data point minimizing the mean arc distance to the sample; ties go to
    the smallest angle.
    """
    column = _column(values)
    candidates = np.unique(column)
    scores = np.empty(candidates.size)
    for start in range(0, candidates.size, MEDIAN_BLOCK):
        block = candidates[start : start + MEDIAN_BLOCK]
        scores[start : start + block.size] = arc_distance(block[:, None], column[None, :]).mean(axis=1)
    best = scores.min()
    # candidates are sorted, so the first tie is the smallest angle
    return float(candidates[np.flatnonzero(scores <= best + TIE_TOL)[0]])


def _signed_offsets(column: np.ndarray, center: float) -> np.ndarray:
    """Offsets from center in (-pi, pi]; the antipode maps to +pi."""
    return np.pi - np.mod(np.pi - (column - center), TWO_PI)


def circular_quartiles(values, median: float = None):
    """
    (q1, q3): medians of the observations on the clockwise and
    counter-clockwise arcs from the median. An empty arc yields the median.
    """
    column = _column(values)
    if median is None:
        median = circular_median(column)
    offsets = _signed_offsets(column, median)
    lower = column[offsets < 0.0]
    upper = column[offsets > 0.0]
    q1 = circular_median(lower) if lower.size else median
    q3 = circular_median(upper) if upper.size else median
    return q1, q3


def circular_summary(values) -> CircularSummary:
    """Mean direction, resultant length, median and quartiles of one column."""
    column = _column(values)
    median = circular_median(column)
    q1, q3 = circular_quartiles(column, median)
    return CircularSummary(
        mean_direction=mean_direction(column),
        resultant_length=resultant_length(column),
        median=median,
        q1=q1,
        q3=q3,
        n_obs=int(column.size),
    )


def circular_correlation(a, b) -> float:
    """
    Jammalamadaka-SenGupta coefficient

        sum sin(a - mean_a) sin(b - mean_b)
        / sqrt(sum sin^2(a - mean_a) * sum sin^2(b - mean_b))

    with circular means mean_a, mean_b.
    """
    a = _column(a)
    b = _column(b)
    if a.size != b.size:
        raise ArgumentError(f"columns have different lengths ({a.size} and {b.size})")
    if a.size < 2:
        raise DataError("circular correlation needs at least two observations")

    sa = np.sin(a - np.angle(np.sum(np.exp(1j * a))))
    sb = np.sin(b - np.angle(np.sum(np.exp(1j * b))))
    var_a = float(np.sum(sa**2))
    var_b = float(np.sum(sb**2))
    if min(var_a, var_b) < MIN_SINE_DISPERSION * a.size:
        raise DegenerateDataError("a column has zero sine dispersion; correlation undefined")
    r = float(np.sum(sa * sb)) / np.sqrt(var_a * var_b)
    return float(np.clip(r, -1.0, 1.0))


def correlation_matrix(rows) -> np.ndarray:
    """Symmetric matrix of pairwise circular correlations over the columns."""
    rows = np.asarray(getattr(rows, "rows", rows), dtype=np.float64)
    if rows.ndim != 2:
        raise ArgumentError(f"expected a 2-D angle matrix, got shape {rows.shape}")
    n_vars = rows.shape[1]
    out = np.eye(n_vars)
    for i in range(n_vars):
        for j in range(i + 1, n_vars):
            out[i, j] = out[j, i] = circular_correlation(rows[:, i], rows[:, j])
    return out


def summarize_columns(dataset) -> Dict[str, CircularSummary]:
    """circular_summary of every column of an AngularDataset, by name."""
    return {
        name: circular_summary(dataset.rows[:, i])
        for i, name in enumerate(dataset.var_names)
    }
