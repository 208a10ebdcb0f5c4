"""Finite-support load profiles and the two bundled reference loads.

A profile is a sequence of power demands at a fixed cadence (1 or 10
minutes); demand is zero outside the declared support. The bundled
fixtures are a 75-minute dishwasher cycle sampled per minute and a
24-hour single-family household day sampled per 10 minutes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

#: Cadences that divide the 10-minute observation interval evenly.
VALID_CADENCES = (1, 2, 5, 10)


@dataclass(frozen=True)
class LoadProfile:
    """Power demand sequence with finite support.

    ``demand[k]`` is the load in watts during substep ``k`` of the profile;
    outside ``[0, support_length)`` the demand is zero.
    """

    name: str
    cadence_minutes: int
    demand: np.ndarray

    def __post_init__(self) -> None:
        demand = np.asarray(self.demand, dtype=np.float64)
        object.__setattr__(self, "demand", demand)
        if self.cadence_minutes not in VALID_CADENCES:
            raise ValueError(
                f"cadence {self.cadence_minutes} min does not divide 10 minutes"
            )
        if demand.ndim != 1 or len(demand) == 0:
            raise ValueError("demand must be a nonempty 1-d sequence")
        if np.any(demand < 0) or not np.all(np.isfinite(demand)):
            raise ValueError("demand values must be finite and non-negative")

    @property
    def support_length(self) -> int:
        """Number of substeps the profile runs for (T_a)."""
        return len(self.demand)

    @property
    def duration_minutes(self) -> int:
        return self.support_length * self.cadence_minutes

    @property
    def total_energy_wh(self) -> float:
        """Energy of one complete run of the profile."""
        return float(self.demand.sum()) * self.cadence_minutes / 60.0


def demand_at(profile: LoadProfile, t_prime: int) -> float:
    """Demand at substep ``t_prime``; zero outside the support."""
    if 0 <= t_prime < profile.support_length:
        return float(profile.demand[t_prime])
    return 0.0


def load_profile_from_csv(source: bytes | str | Path | TextIO, name: str | None = None) -> LoadProfile:
    """Read a load profile file.

    Format: a ``# cadence_minutes: N`` comment line (and optionally
    ``# name: ...``), a ``t_index,power_w`` header, then rows with
    contiguous ``t_index`` running 0..T_a-1.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()

    meta: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition(":")
            meta[key.strip()] = value.strip()
        elif stripped:
            body.append(line)

    if "cadence_minutes" not in meta:
        raise ValueError("load profile must declare '# cadence_minutes: N'")
    cadence = int(meta["cadence_minutes"])

    reader = csv.DictReader(io.StringIO("\n".join(body)))
    if reader.fieldnames is None or not {"t_index", "power_w"}.issubset(reader.fieldnames):
        raise ValueError("load profile needs 't_index,power_w' columns")
    demand: list[float] = []
    for row in reader:
        t_index = int(row["t_index"])
        if t_index != len(demand):
            raise ValueError(
                f"t_index {t_index} out of order; indices must run 0..T_a-1 contiguously"
            )
        value = float(row["power_w"])
        if value < 0:
            raise ValueError(f"t_index {t_index}: negative power {value}")
        demand.append(value)
    if not demand:
        raise ValueError("load profile has no rows")

    return LoadProfile(
        name=name or meta.get("name", "unnamed"),
        cadence_minutes=cadence,
        demand=np.asarray(demand),
    )


def load_profile_to_csv(profile: LoadProfile) -> str:
    out = io.StringIO()
    out.write(f"# name: {profile.name}\n")
    out.write(f"# cadence_minutes: {profile.cadence_minutes}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t_index", "power_w"])
    for t_index, value in enumerate(profile.demand):
        writer.writerow([t_index, repr(float(value))])
    return out.getvalue()


def _bundled(filename: str, name: str) -> LoadProfile:
    from importlib.resources import files

    resource = files("windatlas").joinpath(f"data/loads/{filename}")
    return load_profile_from_csv(resource.read_text(encoding="utf-8"), name=name)


def dishwasher_profile() -> LoadProfile:
    """Bundled dishwasher cycle: 75 one-minute substeps."""
    return _bundled("dishwasher.csv", "dishwasher")


def household_profile() -> LoadProfile:
    """Bundled single-family household day: 144 ten-minute substeps."""
    return _bundled("household.csv", "household")
