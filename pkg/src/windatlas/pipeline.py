"""End-to-end orchestration: station files in, atlas artifacts out.

The heavy lifting happens per station (parse, impute, convert to power,
scan, aggregate temporal structure) and stations are independent, so the
orchestrator can fan them out across worker processes; results come back
in file-discovery order, which keeps every output byte-identical no matter
how many workers ran. A manifest records the configuration, input
checksums and stage timings of each run.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from . import analysis, atlas, ingest, loads, power, simulate, timeseries

logger = logging.getLogger(__name__)

#: Default env var consulted for the station data directory.
DATA_DIR_ENV = "WINDATLAS_DATA_DIR"


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the station and stage."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one reproducible pipeline run depends on."""

    station_dir: Path
    out_dir: Path
    catalog_path: Path | None = None
    input_format: str = "canonical"
    power_curve_path: Path | None = None
    reference_height: float = 10.0
    hub_height: float = 100.0
    alpha: float = 1.0 / 7.0
    load_path: Path | None = None
    capacities_wh: tuple[float, ...] = (1000.0,)
    kernel: str = "fast"
    missing_threshold: float = 0.03
    starts_per_year: int = simulate.STARTS_PER_YEAR
    jobs: int = 1
    dump_imputed: bool = False

    def __post_init__(self) -> None:
        if self.input_format not in ingest.MAPPINGS:
            raise ValueError(f"unknown input format {self.input_format!r}")
        if self.kernel not in simulate.KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not self.capacities_wh or any(c <= 0 for c in self.capacities_wh):
            raise ValueError("capacities must be a nonempty list of positive Wh values")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def extrapolation(self) -> power.HeightExtrapolation:
        return power.HeightExtrapolation(
            reference_height=self.reference_height,
            hub_height=self.hub_height,
            alpha=self.alpha,
        )

    def load_profile(self) -> loads.LoadProfile:
        if self.load_path is None:
            return loads.dishwasher_profile()
        return loads.load_profile_from_csv(Path(self.load_path))

    def power_curve(self) -> power.PowerCurve:
        if self.power_curve_path is None:
            return power.default_power_curve()
        return power.power_curve_from_csv(
            Path(self.power_curve_path), name=Path(self.power_curve_path).stem
        )


@dataclass(frozen=True)
class StationResult:
    """Per-station outcome; analysis fields are None for excluded stations."""

    station_id: str
    n_slots: int
    n_missing: int
    missing_fraction: float
    kept: bool
    start: datetime | None = None
    rhos: tuple[float, ...] | None = None
    suitable_counts: tuple[int, ...] | None = None
    hourly_counts: np.ndarray | None = None
    monthly_counts: np.ndarray | None = None
    normalized_entropy: float | None = None
    monthly_mean_speeds: np.ndarray | None = None


@dataclass(frozen=True)
class _StationTask:
    path: str
    station_id: str
    input_format: str
    missing_threshold: float
    curve: power.PowerCurve
    extrapolation: power.HeightExtrapolation
    profile: loads.LoadProfile
    capacities_wh: tuple[float, ...]
    kernel: str
    starts_per_year: int
    dump_dir: str | None


def _run_stage(station_id: str, stage: str, fn, *args):
    try:
        return fn(*args)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"station {station_id}, stage {stage}: {exc}") from exc


def _process_station(task: _StationTask) -> StationResult:
    mapping = ingest.MAPPINGS[task.input_format]
    # filename stem only names layouts without a station column (FMI);
    # the canonical layout's own id column wins
    station_hint = task.station_id if mapping.station_id is None else None
    table = _run_stage(
        task.station_id,
        "parse",
        ingest.parse_station_csv,
        Path(task.path),
        mapping,
        station_hint,
    )
    fraction = _run_stage(table.station_id, "parse", ingest.missing_fraction, table)
    if fraction > task.missing_threshold:
        return StationResult(
            station_id=table.station_id,
            n_slots=table.n_slots,
            n_missing=table.n_missing,
            missing_fraction=fraction,
            kept=False,
        )

    series = _run_stage(table.station_id, "impute", timeseries.impute_linear, table)
    if task.dump_dir is not None:
        dump_path = Path(task.dump_dir) / f"{table.station_id}.csv"
        dump_path.write_text(timeseries.imputation_dump_csv(series), encoding="utf-8")

    power_series = _run_stage(
        table.station_id,
        "power",
        power.speeds_to_power,
        series,
        task.extrapolation,
        task.curve,
    )

    scan = simulate.KERNELS[task.kernel]
    rhos: list[float] = []
    counts: list[int] = []
    atlas_mask: np.ndarray | None = None
    for index, capacity in enumerate(task.capacities_wh):
        cfg = simulate.SimulationConfig.for_profile(
            capacity, task.profile, task.starts_per_year
        )
        result = _run_stage(table.station_id, "scan", scan, power_series, task.profile, cfg)
        rhos.append(result.rho)
        counts.append(result.n_suitable)
        if index == 0:
            atlas_mask = result.suitable_mask

    assert atlas_mask is not None
    distribution = _run_stage(
        table.station_id, "analysis", analysis.temporal_distribution, atlas_mask, series.start
    )
    mean_speeds = _run_stage(
        table.station_id, "analysis", analysis.monthly_mean_speed, series
    )
    return StationResult(
        station_id=table.station_id,
        n_slots=table.n_slots,
        n_missing=table.n_missing,
        missing_fraction=fraction,
        kept=True,
        start=series.start,
        rhos=tuple(rhos),
        suitable_counts=tuple(counts),
        hourly_counts=distribution.hourly_counts,
        monthly_counts=distribution.monthly_counts,
        normalized_entropy=distribution.normalized_entropy,
        monthly_mean_speeds=mean_speeds,
    )


def discover_station_files(config: RunConfig) -> list[Path]:
    """Station observation files, sorted by name for reproducible order."""
    station_dir = Path(config.station_dir)
    if not station_dir.is_dir():
        raise PipelineError(f"station directory {station_dir} does not exist")
    catalog = Path(config.catalog_path).resolve() if config.catalog_path else None
    files = [
        path
        for path in sorted(station_dir.glob("*.csv"))
        if catalog is None or path.resolve() != catalog
    ]
    if not files:
        raise PipelineError(f"no station CSV files found in {station_dir}")
    return files


def process_stations(config: RunConfig) -> list[StationResult]:
    """Parse, filter, impute, convert and scan every station in the directory."""
    files = discover_station_files(config)
    curve = config.power_curve()
    profile = config.load_profile()
    extrapolation = config.extrapolation()

    dump_dir: str | None = None
    if config.dump_imputed:
        dump_path = Path(config.out_dir) / "imputed"
        dump_path.mkdir(parents=True, exist_ok=True)
        dump_dir = str(dump_path)

    tasks = [
        _StationTask(
            path=str(path),
            station_id=path.stem,
            input_format=config.input_format,
            missing_threshold=config.missing_threshold,
            curve=curve,
            extrapolation=extrapolation,
            profile=profile,
            capacities_wh=tuple(config.capacities_wh),
            kernel=config.kernel,
            starts_per_year=config.starts_per_year,
            dump_dir=dump_dir,
        )
        for path in files
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_process_station, tasks))
    else:
        results = [_process_station(task) for task in tasks]
    return results


# ---------------------------------------------------------------------------
# Output writers
# ---------------------------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_ingest_report(out_dir: Path, results: list[StationResult]) -> Path:
    path = Path(out_dir) / "ingest_report.csv"
    rows = [
        [
            r.station_id,
            r.n_slots,
            r.n_missing,
            f"{r.missing_fraction:.6f}",
            "kept" if r.kept else "excluded",
        ]
        for r in results
    ]
    _write_csv(path, ["station_id", "n_slots", "n_missing", "missing_fraction", "status"], rows)
    return path


def write_station_rho(out_dir: Path, results: list[StationResult]) -> Path:
    path = Path(out_dir) / "station_rho.csv"
    rows = [[r.station_id, f"{r.rhos[0]:.4f}"] for r in results if r.kept and r.rhos]
    _write_csv(path, ["station_id", "rho"], rows)
    return path


def write_sweep(out_dir: Path, sweep_rows: list[simulate.SweepRow]) -> Path:
    path = Path(out_dir) / "sweep.csv"
    rows = [
        [
            f"{row.battery_capacity_wh:g}",
            f"{row.min_rho:.4f}",
            f"{row.max_rho:.4f}",
            f"{row.mean_rho:.4f}",
            f"{row.std_rho:.4f}",
        ]
        for row in sweep_rows
    ]
    _write_csv(path, ["capacity_wh", "min", "max", "mean", "std"], rows)
    return path


def sweep_from_results(
    config: RunConfig, results: list[StationResult]
) -> list[simulate.SweepRow]:
    """Assemble sweep statistics from per-station scan counts."""
    kept = [r for r in results if r.kept and r.rhos is not None]
    if not kept:
        raise PipelineError("no stations survived the missing-data filter")
    rows = []
    for index, capacity in enumerate(config.capacities_wh):
        stats = analysis.summarize([r.rhos[index] for r in kept])
        rows.append(
            simulate.SweepRow(
                battery_capacity_wh=capacity,
                min_rho=stats.min,
                max_rho=stats.max,
                mean_rho=stats.mean,
                std_rho=stats.std,
            )
        )
    return rows


def write_analysis(out_dir: Path, results: list[StationResult]) -> list[Path]:
    out_dir = Path(out_dir)
    kept = [r for r in results if r.kept]

    hourly_rows = []
    monthly_rows = []
    entropy_rows = []
    speed_rows = []
    for r in kept:
        for hour in range(24):
            hourly_rows.append([r.station_id, hour, int(r.hourly_counts[hour])])
        for month in range(12):
            monthly_rows.append([r.station_id, month + 1, int(r.monthly_counts[month])])
        entropy = "" if r.normalized_entropy is None else f"{r.normalized_entropy:.6f}"
        entropy_rows.append([r.station_id, entropy])
        for month in range(12):
            value = r.monthly_mean_speeds[month]
            speed_rows.append([r.station_id, month + 1, "" if np.isnan(value) else f"{value:.4f}"])

    paths = []
    for name, header, rows in [
        ("hourly_counts.csv", ["station_id", "hour", "count"], hourly_rows),
        ("monthly_counts.csv", ["station_id", "month", "count"], monthly_rows),
        ("entropy.csv", ["station_id", "normalized_entropy"], entropy_rows),
        ("monthly_mean_speed.csv", ["station_id", "month", "mean_speed_ms"], speed_rows),
    ]:
        path = out_dir / name
        _write_csv(path, header, rows)
        paths.append(path)
    return paths


def build_atlas_entries(
    config: RunConfig,
    results: list[StationResult],
    catalog: list[ingest.StationMeta],
    load_name: str,
) -> list[atlas.StationAtlasEntry]:
    by_id = {meta.station_id: meta for meta in catalog}
    entries = []
    for r in results:
        if not r.kept or r.rhos is None:
            continue
        meta = by_id.get(r.station_id)
        if meta is None:
            logger.warning("station %s missing from catalog; omitted from atlas", r.station_id)
            continue
        entries.append(
            atlas.StationAtlasEntry(
                meta=meta,
                rho=r.rhos[0],
                normalized_entropy=r.normalized_entropy,
                hourly_counts=r.hourly_counts,
                monthly_counts=r.monthly_counts,
                battery_capacity_wh=config.capacities_wh[0],
                load_name=load_name,
            )
        )
    return entries


def write_atlas_files(
    out_prefix: Path, entries: list[atlas.StationAtlasEntry], style: atlas.MapStyle = atlas.MapStyle()
) -> list[Path]:
    out_prefix = Path(out_prefix)
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out_prefix.with_suffix(".csv")
    geojson_path = out_prefix.with_suffix(".geojson")
    svg_path = out_prefix.with_suffix(".svg")
    csv_path.write_text(atlas.atlas_to_csv(entries), encoding="utf-8")
    geojson_path.write_bytes(atlas.to_geojson(entries))
    svg_path.write_bytes(atlas.to_svg_map(entries, style))
    return [csv_path, geojson_path, svg_path]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def write_manifest(
    config: RunConfig,
    station_files: list[Path],
    timings: dict[str, float],
    extra: dict | None = None,
) -> Path:
    from . import __version__

    curve_source = config.power_curve_path
    load_source = config.load_path
    manifest = {
        "windatlas_version": __version__,
        "config": {
            "station_dir": str(config.station_dir),
            "catalog_path": str(config.catalog_path) if config.catalog_path else None,
            "input_format": config.input_format,
            "power_curve": str(curve_source) if curve_source else "bundled:nordex_n100_2500",
            "reference_height_m": config.reference_height,
            "hub_height_m": config.hub_height,
            "alpha": config.alpha,
            "load": str(load_source) if load_source else "bundled:dishwasher",
            "capacities_wh": list(config.capacities_wh),
            "kernel": config.kernel,
            "missing_threshold": config.missing_threshold,
            "starts_per_year": config.starts_per_year,
            "jobs": config.jobs,
        },
        "input_sha256": {path.name: _sha256(path) for path in station_files},
        "power_curve_sha256": hashlib.sha256(
            power.power_curve_to_csv(config.power_curve()).encode("utf-8")
        ).hexdigest(),
        "load_sha256": hashlib.sha256(
            loads.load_profile_to_csv(config.load_profile()).encode("utf-8")
        ).hexdigest(),
        "timings_s": {stage: round(seconds, 3) for stage, seconds in timings.items()},
    }
    if config.catalog_path:
        manifest["catalog_sha256"] = _sha256(Path(config.catalog_path))
    if extra:
        manifest.update(extra)
    path = Path(config.out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


@dataclass
class PipelineOutput:
    results: list[StationResult]
    sweep_rows: list[simulate.SweepRow]
    written: list[Path] = field(default_factory=list)


def run_pipeline(config: RunConfig) -> PipelineOutput:
    """Execute the full pipeline and write every artifact into ``out_dir``.

    Stages: ingest and filter stations, impute gaps, convert speeds to
    turbine power, scan every candidate start at each battery capacity,
    aggregate temporal structure, and export the atlas (built at the first
    capacity). Outputs are deterministic for fixed inputs and config.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    station_files = discover_station_files(config)
    results = process_stations(config)
    timings["process_stations"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    written = [
        write_ingest_report(out_dir, results),
        write_station_rho(out_dir, results),
    ]
    sweep_rows = sweep_from_results(config, results)
    written.append(write_sweep(out_dir, sweep_rows))
    written.extend(write_analysis(out_dir, results))

    if config.catalog_path is not None:
        catalog = ingest.load_station_catalog(Path(config.catalog_path))
        load_name = config.load_profile().name
        entries = build_atlas_entries(config, results, catalog, load_name)
        if entries:
            written.extend(write_atlas_files(out_dir / "atlas", entries))
        else:
            logger.warning("no catalogued stations to map; atlas files skipped")
    timings["exports"] = time.perf_counter() - t1
    timings["total"] = time.perf_counter() - t0

    n_kept = sum(1 for r in results if r.kept)
    written.append(
        write_manifest(
            config,
            station_files,
            timings,
            extra={"n_stations": len(results), "n_kept": n_kept},
        )
    )
    return PipelineOutput(results=results, sweep_rows=sweep_rows, written=written)
