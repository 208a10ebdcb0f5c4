"""Gap imputation: turn a raw observation table into a complete speed series.

Interior gaps are filled with the straight line through the nearest
observations on either side, evaluated at slot indices. Gaps touching the
series boundary have only one neighbour, so they are filled by holding that
neighbour constant; the imputed mask flags them like any other filled slot so
downstream users can exclude such stations if they care.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .ingest import STEP, RawObservationTable


@dataclass(frozen=True)
class WindSpeedSeries:
    """Complete 10 m wind-speed series at 10-minute cadence.

    ``speeds`` holds one finite, non-negative value per slot;
    ``imputed_mask`` is True exactly where the value was filled in.
    """

    station_id: str
    start: datetime
    speeds: np.ndarray
    imputed_mask: np.ndarray

    def __post_init__(self) -> None:
        if len(self.speeds) != len(self.imputed_mask):
            raise ValueError("speeds and imputed_mask must have equal length")
        if not np.all(np.isfinite(self.speeds)) or np.any(self.speeds < 0):
            raise ValueError("speed series must be finite and non-negative")

    @property
    def n_slots(self) -> int:
        return len(self.speeds)

    @property
    def step(self) -> timedelta:
        return STEP


def impute_linear(table: RawObservationTable) -> WindSpeedSeries:
    """Fill every missing slot by linear interpolation between its neighbours.

    Parameters
    ----------
    table : RawObservationTable
        Grid-canonical table; NaN marks missing slots.

    Returns
    -------
    WindSpeedSeries
        Same grid with no missing values. Observed values pass through
        unchanged; interior gaps get the line through the bracketing
        observations, boundary gaps the nearest observation held constant.

    Raises
    ------
    ValueError
        All slots are missing, so there is nothing to interpolate from.
    """
    speeds = table.speeds
    missing = np.isnan(speeds)
    if missing.all():
        raise ValueError(f"station {table.station_id}: all observations missing")
    if not missing.any():
        filled = speeds.copy()
    else:
        idx = np.arange(len(speeds), dtype=np.float64)
        filled = np.interp(idx, idx[~missing], speeds[~missing])
    return WindSpeedSeries(
        station_id=table.station_id,
        start=table.start,
        speeds=filled,
        imputed_mask=missing.copy(),
    )


def imputation_dump_csv(series: WindSpeedSeries) -> str:
    """Debug dump of an imputed series: ``slot,speed,imputed``."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["slot", "speed", "imputed"])
    for slot in range(series.n_slots):
        writer.writerow(
            [slot, repr(float(series.speeds[slot])), int(series.imputed_mask[slot])]
        )
    return out.getvalue()
