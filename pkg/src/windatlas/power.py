"""Wind speed at 10 m to turbine output power at hub height.

Two steps: scale the measured speed to hub height with the empirical 1/7
power law, then look the scaled speed up in the turbine power curve using
linear interpolation between tabulated knots. Below the first knot and at or
above the cut-out speed the turbine delivers nothing; between the last knot
and cut-out it holds the last knot's power (rated plateau).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import TextIO, Union

import numpy as np

from .timeseries import WindSpeedSeries

Numeric = Union[float, np.ndarray]


@dataclass(frozen=True)
class PowerCurve:
    """Tabulated turbine power curve: output power per hub-height speed.

    Parameters
    ----------
    speeds : ndarray
        Knot speeds in m/s, strictly increasing, first knot >= 0.
    powers : ndarray
        Output power at each knot in watts, all >= 0.
    cut_out : float
        Speed at and above which the turbine shuts down; must not be below
        the last knot speed.
    """

    speeds: np.ndarray
    powers: np.ndarray
    cut_out: float
    name: str = "unnamed"

    def __post_init__(self) -> None:
        speeds = np.asarray(self.speeds, dtype=np.float64)
        powers = np.asarray(self.powers, dtype=np.float64)
        object.__setattr__(self, "speeds", speeds)
        object.__setattr__(self, "powers", powers)
        if speeds.shape != powers.shape or speeds.ndim != 1 or len(speeds) < 2:
            raise ValueError("curve needs matching 1-d speed/power arrays with >= 2 knots")
        if not np.all(np.diff(speeds) > 0):
            raise ValueError("knot speeds must be strictly increasing")
        if speeds[0] < 0:
            raise ValueError("knot speeds must be non-negative")
        if np.any(powers < 0) or not np.all(np.isfinite(powers)):
            raise ValueError("knot powers must be finite and non-negative")
        if self.cut_out < speeds[-1]:
            raise ValueError(
                f"cut_out {self.cut_out} below last knot speed {speeds[-1]}"
            )

    @property
    def max_power(self) -> float:
        return float(self.powers.max())


@dataclass(frozen=True)
class HeightExtrapolation:
    """1/7 power-law shear model between measurement and hub height."""

    reference_height: float = 10.0
    hub_height: float = 100.0
    alpha: float = 1.0 / 7.0

    def __post_init__(self) -> None:
        if self.reference_height <= 0 or self.hub_height <= 0:
            raise ValueError("heights must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def factor(self) -> float:
        """Multiplicative speed scaling (hub/reference)^alpha."""
        return (self.hub_height / self.reference_height) ** self.alpha


@dataclass(frozen=True)
class WindPowerSeries:
    """Estimated turbine output at 10-minute cadence, in watts."""

    station_id: str
    start: datetime
    power: np.ndarray
    curve_name: str = field(default="unnamed", compare=False)

    @property
    def n_slots(self) -> int:
        return len(self.power)


def extrapolate_speed(v10: Numeric, cfg: HeightExtrapolation = HeightExtrapolation()) -> Numeric:
    """Scale a 10 m wind speed to hub height with the power law.

    Parameters
    ----------
    v10 : float or ndarray
        Wind speed at the reference height, m/s, non-negative.
    cfg : HeightExtrapolation
        Heights and shear exponent; defaults are 10 m -> 100 m, alpha = 1/7.

    Returns
    -------
    float or ndarray
        ``v10 * (hub_height / reference_height) ** alpha``.
    """
    arr = np.asarray(v10, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("negative wind speed; clean observations upstream")
    out = arr * cfg.factor
    return float(out) if np.isscalar(v10) or arr.ndim == 0 else out


def power_at_speed(v_hub: Numeric, curve: PowerCurve) -> Numeric:
    """Turbine output power for a hub-height speed.

    Linear interpolation between curve knots; zero below the first knot and
    at or above cut-out; the last knot's power holds up to cut-out.
    Knot speeds reproduce their tabulated power exactly.
    """
    arr = np.asarray(v_hub, dtype=np.float64)
    out = np.interp(arr, curve.speeds, curve.powers, left=0.0)
    out = np.where(arr >= curve.cut_out, 0.0, out)
    return float(out) if np.isscalar(v_hub) or arr.ndim == 0 else out


def speeds_to_power(
    series: WindSpeedSeries,
    cfg: HeightExtrapolation,
    curve: PowerCurve,
) -> WindPowerSeries:
    """Convert a complete 10 m speed series into a turbine power series."""
    hub_speeds = extrapolate_speed(series.speeds, cfg)
    power = power_at_speed(hub_speeds, curve)
    return WindPowerSeries(
        station_id=series.station_id,
        start=series.start,
        power=np.asarray(power, dtype=np.float64),
        curve_name=curve.name,
    )


def power_curve_from_csv(source: bytes | str | Path | TextIO, name: str | None = None) -> PowerCurve:
    """Read a power curve file.

    Format: optional ``# key: value`` comment lines (``cut_out_ms`` required,
    ``name`` optional), then a ``speed_ms,power_w`` header and one knot per
    row in ascending speed order.
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

    if "cut_out_ms" not in meta:
        raise ValueError("power curve file must declare '# cut_out_ms: <speed>'")
    reader = csv.DictReader(io.StringIO("\n".join(body)))
    if reader.fieldnames is None or not {"speed_ms", "power_w"}.issubset(reader.fieldnames):
        raise ValueError("power curve needs 'speed_ms,power_w' columns")
    speeds = []
    powers = []
    for row in reader:
        speeds.append(float(row["speed_ms"]))
        powers.append(float(row["power_w"]))
    if not speeds:
        raise ValueError("power curve has no knots")
    return PowerCurve(
        speeds=np.asarray(speeds),
        powers=np.asarray(powers),
        cut_out=float(meta["cut_out_ms"]),
        name=name or meta.get("name", "unnamed"),
    )


def power_curve_to_csv(curve: PowerCurve) -> str:
    out = io.StringIO()
    out.write(f"# name: {curve.name}\n")
    out.write(f"# cut_out_ms: {curve.cut_out!r}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["speed_ms", "power_w"])
    for v, p in zip(curve.speeds, curve.powers):
        writer.writerow([repr(float(v)), repr(float(p))])
    return out.getvalue()


def default_power_curve() -> PowerCurve:
    """The bundled Nordex N100/2500 curve (2.5 MW, cut-out 20 m/s)."""
    from importlib.resources import files

    resource = files("windatlas").joinpath("data/power_curves/nordex_n100_2500.csv")
    return power_curve_from_csv(resource.read_text(encoding="utf-8"), name="nordex_n100_2500")
