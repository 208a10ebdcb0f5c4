"""Battery-backed feasibility scan over a year of candidate start instants.

A candidate start is suitable when a battery that begins empty never goes
negative while the load profile runs: each substep adds the wind surplus
(or deficit) ``(P_wind - demand) * dt`` and clamps the stored energy at the
battery capacity. Wind power is constant within each 10-minute observation
interval; 1-minute load profiles therefore see the same wind power for ten
consecutive substeps. The useful annual fraction is the share of the year's
52,560 ten-minute start instants that are suitable.

Energy bookkeeping keeps the recurrence in watt-substeps (the exact
per-hour substep count folds the ``dt`` factor away), so naive and
vectorized kernels perform bit-identical float operations; conversion to
watt-hours happens only when a battery trace is reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analysis import summarize
from .loads import LoadProfile
from .power import WindPowerSeries

#: Candidate start instants in one (non-leap) year: 365 * 24 * 6.
STARTS_PER_YEAR = 365 * 24 * 6


@dataclass(frozen=True)
class SimulationConfig:
    """Battery capacity and scan bookkeeping for one feasibility run."""

    battery_capacity_wh: float
    substep_minutes: int = 10
    starts_per_year: int = STARTS_PER_YEAR

    def __post_init__(self) -> None:
        if self.battery_capacity_wh < 0:
            raise ValueError("battery capacity must be >= 0")
        if self.substep_minutes <= 0 or 10 % self.substep_minutes != 0:
            raise ValueError(
                f"substep of {self.substep_minutes} min must divide 10 minutes"
            )
        if self.starts_per_year <= 0:
            raise ValueError("starts_per_year must be positive")

    @classmethod
    def for_profile(
        cls,
        battery_capacity_wh: float,
        profile: LoadProfile,
        starts_per_year: int = STARTS_PER_YEAR,
    ) -> "SimulationConfig":
        return cls(battery_capacity_wh, profile.cadence_minutes, starts_per_year)

    @property
    def substeps_per_hour(self) -> int:
        return 60 // self.substep_minutes


@dataclass(frozen=True)
class SuitabilityResult:
    """Per-start suitability mask and the useful fraction it implies."""

    suitable_mask: np.ndarray
    n_suitable: int
    n_starts: int

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "SuitabilityResult":
        return cls(
            suitable_mask=mask,
            n_suitable=int(np.count_nonzero(mask)),
            n_starts=len(mask),
        )

    @property
    def rho(self) -> float:
        return self.n_suitable / self.n_starts


@dataclass(frozen=True)
class SweepRow:
    """Cross-station useful-fraction statistics at one battery capacity."""

    battery_capacity_wh: float
    min_rho: float
    max_rho: float
    mean_rho: float
    std_rho: float


def _check_cadence(profile: LoadProfile, cfg: SimulationConfig) -> None:
    if profile.cadence_minutes != cfg.substep_minutes:
        raise ValueError(
            f"config substep {cfg.substep_minutes} min does not match "
            f"profile cadence {profile.cadence_minutes} min"
        )


def _slots_needed(profile: LoadProfile) -> int:
    """Observation slots a window reads: slot of the last substep, plus one."""
    return ((profile.support_length - 1) * profile.cadence_minutes) // 10 + 1


def simulate_start(
    power: WindPowerSeries,
    profile: LoadProfile,
    cfg: SimulationConfig,
    t_start: int,
) -> bool:
    """Run the battery recurrence for one candidate start.

    The battery starts empty; each substep k adds
    ``wind[t_start + k*cadence // 10] - demand[k]`` (in watt-substeps) and
    clamps at capacity. Returns True when the level never goes negative.
    Windows that would read past the end of the power series are not
    suitable.
    """
    _check_cadence(profile, cfg)
    if not 0 <= t_start < cfg.starts_per_year:
        raise ValueError(f"t_start {t_start} outside [0, {cfg.starts_per_year})")

    if t_start + _slots_needed(profile) > power.n_slots:
        return False

    wind = power.power
    demand = profile.demand
    sub = cfg.substep_minutes
    cap = cfg.battery_capacity_wh * cfg.substeps_per_hour

    level = 0.0
    for k in range(profile.support_length):
        level = min(level + (wind[t_start + (k * sub) // 10] - demand[k]), cap)
        if level < 0.0:
            return False
    return True


def battery_trace(
    power: WindPowerSeries,
    profile: LoadProfile,
    cfg: SimulationConfig,
    t_start: int,
) -> np.ndarray:
    """Battery energy in Wh at each checked instant of one window.

    The trace starts at 0 Wh; if the level goes negative the (unclamped
    below) failing value is the last entry and the simulation stops there.
    """
    _check_cadence(profile, cfg)
    if t_start + _slots_needed(profile) > power.n_slots:
        raise ValueError(f"window at t_start {t_start} overruns the power series")

    wind = power.power
    demand = profile.demand
    sub = cfg.substep_minutes
    per_hour = cfg.substeps_per_hour
    cap = cfg.battery_capacity_wh * per_hour

    trace = [0.0]
    level = 0.0
    for k in range(profile.support_length):
        level = min(level + (wind[t_start + (k * sub) // 10] - demand[k]), cap)
        trace.append(level / per_hour)
        if level < 0.0:
            break
    return np.asarray(trace)


def useful_fraction(
    power: WindPowerSeries,
    profile: LoadProfile,
    cfg: SimulationConfig,
) -> SuitabilityResult:
    """Naive reference scan: run the recurrence start by start."""
    _check_cadence(profile, cfg)
    n_starts = cfg.starts_per_year
    needed = _slots_needed(profile)
    n_valid = min(max(power.n_slots - needed + 1, 0), n_starts)

    wind = power.power.tolist()
    demand = profile.demand.tolist()
    sub = cfg.substep_minutes
    cap = cfg.battery_capacity_wh * cfg.substeps_per_hour
    t_a = len(demand)

    mask = np.zeros(n_starts, dtype=bool)
    for t_start in range(n_valid):
        level = 0.0
        suitable = True
        for k in range(t_a):
            level = min(level + (wind[t_start + (k * sub) // 10] - demand[k]), cap)
            if level < 0.0:
                suitable = False
                break
        mask[t_start] = suitable
    return SuitabilityResult.from_mask(mask)


def useful_fraction_fast(
    power: WindPowerSeries,
    profile: LoadProfile,
    cfg: SimulationConfig,
) -> SuitabilityResult:
    """Vectorized scan, bit-identical to :func:`useful_fraction`.

    All windows advance together, one substep per pass over a start-indexed
    level vector; each element sees exactly the float operations the naive
    recurrence would apply, so the masks agree bit for bit.
    """
    _check_cadence(profile, cfg)
    n_starts = cfg.starts_per_year
    needed = _slots_needed(profile)
    n_valid = min(max(power.n_slots - needed + 1, 0), n_starts)
    if n_valid == 0:
        return SuitabilityResult.from_mask(np.zeros(n_starts, dtype=bool))

    wind = power.power
    demand = profile.demand
    sub = cfg.substep_minutes
    cap = cfg.battery_capacity_wh * cfg.substeps_per_hour

    # Pad so every start index can read a full window; padded slots only
    # feed starts that are forced unsuitable below.
    padded = np.zeros(n_starts + needed - 1, dtype=np.float64)
    span = min(len(wind), len(padded))
    padded[:span] = wind[:span]

    level = np.zeros(n_starts, dtype=np.float64)
    ok = np.ones(n_starts, dtype=bool)
    for k in range(profile.support_length):
        shift = (k * sub) // 10
        level += padded[shift : shift + n_starts] - demand[k]
        np.minimum(level, cap, out=level)
        ok &= level >= 0.0
        if not ok.any():
            break
    ok[n_valid:] = False
    return SuitabilityResult.from_mask(ok)


KERNELS = {"naive": useful_fraction, "fast": useful_fraction_fast}


def capacity_sweep(
    powers: Sequence[WindPowerSeries] | Iterable[WindPowerSeries],
    profile: LoadProfile,
    capacities_wh: Sequence[float],
    starts_per_year: int = STARTS_PER_YEAR,
    kernel: str = "fast",
) -> list[SweepRow]:
    """Cross-station rho statistics for each battery capacity.

    Statistics are population statistics over the given stations, one
    :class:`SweepRow` per capacity in input order.
    """
    if not capacities_wh:
        raise ValueError("capacities_wh must be nonempty")
    scan = KERNELS[kernel]
    powers = list(powers)
    rows = []
    for capacity in capacities_wh:
        cfg = SimulationConfig.for_profile(capacity, profile, starts_per_year)
        rhos = [scan(p, profile, cfg).rho for p in powers]
        stats = summarize(rhos)
        rows.append(
            SweepRow(
                battery_capacity_wh=capacity,
                min_rho=stats.min,
                max_rho=stats.max,
                mean_rho=stats.mean,
                std_rho=stats.std,
            )
        )
    return rows
