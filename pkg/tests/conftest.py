from datetime import datetime
from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest

from windatlas import LoadProfile, RawObservationTable, WindPowerSeries

START_2021 = datetime(2021, 1, 1, 0, 0)

FIXTURE_DIR = Path(str(files("windatlas").joinpath("data/fixtures")))
STATION_FIXTURES = sorted((FIXTURE_DIR / "stations").glob("*.csv"))
CATALOG_FIXTURE = FIXTURE_DIR / "station_catalog.csv"


def make_table(speeds, station_id="S1", start=START_2021) -> RawObservationTable:
    return RawObservationTable(
        station_id=station_id,
        start=start,
        speeds=np.asarray(speeds, dtype=np.float64),
    )


def make_power(watts, station_id="S1", start=START_2021) -> WindPowerSeries:
    return WindPowerSeries(
        station_id=station_id,
        start=start,
        power=np.asarray(watts, dtype=np.float64),
    )


def make_profile(demand, cadence_minutes=10, name="test") -> LoadProfile:
    return LoadProfile(
        name=name,
        cadence_minutes=cadence_minutes,
        demand=np.asarray(demand, dtype=np.float64),
    )


def random_instance(rng, integer_values=True, min_slots=20, max_slots=200, max_t_a=12):
    """Random (power, profile, config) triple for kernel cross-checks."""
    from windatlas import SimulationConfig

    n_slots = int(rng.integers(min_slots, max_slots + 1))
    cadence = int(rng.choice([1, 10]))
    t_a = int(rng.integers(2, max_t_a + 1))
    if integer_values:
        wind = rng.integers(0, 2000, size=n_slots).astype(np.float64)
        demand = rng.integers(0, 1500, size=t_a).astype(np.float64)
        capacity = float(rng.integers(1, 400))
    else:
        wind = rng.uniform(0, 2000, size=n_slots)
        demand = rng.uniform(0, 1500, size=t_a)
        capacity = float(rng.uniform(1, 400))
    power = make_power(wind)
    profile = make_profile(demand, cadence_minutes=cadence)
    cfg = SimulationConfig.for_profile(capacity, profile, starts_per_year=n_slots)
    return power, profile, cfg


@pytest.fixture
def rng():
    return np.random.default_rng(123456)
