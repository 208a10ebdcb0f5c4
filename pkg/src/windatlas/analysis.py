"""Temporal structure of suitable starts and cross-station summaries.

Hour-of-day and month groupings use the start timestamps exactly as they
were ingested; no timezone conversion happens anywhere in the pipeline.
The hourly uniformity measure is Shannon entropy of the hour-of-day
distribution normalized by log 24, so 1 means perfectly uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

import numpy as np
import pandas as pd

from .timeseries import WindSpeedSeries

LOG_24 = math.log(24.0)


@dataclass(frozen=True)
class TemporalDistribution:
    """Suitable-start counts by hour and month, plus hourly entropy.

    ``normalized_entropy`` is None when there are no suitable starts (the
    distribution is undefined, which is distinct from being concentrated).
    """

    hourly_counts: np.ndarray
    monthly_counts: np.ndarray
    normalized_entropy: float | None


@dataclass(frozen=True)
class SummaryStats:
    min: float
    max: float
    mean: float
    std: float


def _start_index(start: datetime, n: int) -> pd.DatetimeIndex:
    return pd.date_range(start=start, periods=n, freq="10min")


def normalized_entropy_from_counts(counts: np.ndarray) -> float | None:
    """Shannon entropy of a count histogram, normalized by log 24.

    Empty bins contribute nothing (0 log 0 = 0). Returns None when the
    histogram is all zero.
    """
    counts = np.asarray(counts)
    total = counts.sum()
    if total == 0:
        return None
    p = counts[counts > 0] / total
    entropy = -float(np.sum(p * np.log(p))) + 0.0
    return entropy / LOG_24


def hourly_entropy(
    mask: np.ndarray,
    start: datetime,
) -> tuple[np.ndarray, float | None]:
    """Suitable-start counts per hour of day and their normalized entropy.

    Parameters
    ----------
    mask : ndarray of bool
        Per-start suitability, one entry per 10-minute start instant.
    start : datetime
        Timestamp of start index 0; later indices advance by 10 minutes.

    Returns
    -------
    (counts, normalized_entropy)
        ``counts`` has 24 entries; entropy is None when no start is
        suitable.
    """
    hours = _start_index(start, len(mask)).hour.to_numpy()
    counts = np.bincount(hours[np.asarray(mask, dtype=bool)], minlength=24)
    return counts, normalized_entropy_from_counts(counts)


def monthly_distribution(mask: np.ndarray, start: datetime) -> np.ndarray:
    """Suitable-start counts per calendar month (12 entries, January first)."""
    months = _start_index(start, len(mask)).month.to_numpy()
    return np.bincount(months[np.asarray(mask, dtype=bool)], minlength=13)[1:]


def temporal_distribution(mask: np.ndarray, start: datetime) -> TemporalDistribution:
    hourly, entropy = hourly_entropy(mask, start)
    return TemporalDistribution(
        hourly_counts=hourly,
        monthly_counts=monthly_distribution(mask, start),
        normalized_entropy=entropy,
    )


def monthly_mean_speed(series: WindSpeedSeries) -> np.ndarray:
    """Arithmetic mean 10 m wind speed per calendar month.

    Months not covered by the series come back as NaN.
    """
    months = _start_index(series.start, series.n_slots).month.to_numpy()
    means = np.full(12, np.nan)
    for month in range(1, 13):
        selected = series.speeds[months == month]
        if len(selected):
            means[month - 1] = selected.mean()
    return means


def summarize(values: Sequence[float]) -> SummaryStats:
    """Population min/max/mean/std over a nonempty list of ratios."""
    if len(values) == 0:
        raise ValueError("cannot summarize an empty list")
    arr = np.asarray(values, dtype=np.float64)
    return SummaryStats(
        min=float(arr.min()),
        max=float(arr.max()),
        mean=float(arr.mean()),
        std=float(arr.std()),
    )
