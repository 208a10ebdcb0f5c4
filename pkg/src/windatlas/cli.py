"""Command-line interface for the wind feasibility atlas pipeline."""

from __future__ import annotations

import csv
import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import atlas as atlas_mod
from . import ingest, pipeline, simulate
from .pipeline import DATA_DIR_ENV, PipelineError, RunConfig


def _parse_capacities(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"cannot parse capacities {text!r}")
    if not values:
        raise click.BadParameter("at least one capacity is required")
    return values


def station_dir_option(fn):
    return click.option(
        "--station-dir",
        envvar=DATA_DIR_ENV,
        required=True,
        type=click.Path(exists=True, file_okay=False, path_type=Path),
        help=f"Directory of station observation CSVs (default: ${DATA_DIR_ENV}).",
    )(fn)


def common_ingest_options(fn):
    fn = click.option(
        "--input-format",
        type=click.Choice(sorted(ingest.MAPPINGS)),
        default="canonical",
        show_default=True,
    )(fn)
    fn = click.option(
        "--threshold",
        type=float,
        default=0.03,
        show_default=True,
        help="Exclude stations with missing fraction above this.",
    )(fn)
    return fn


def simulation_options(fn):
    fn = click.option(
        "--power-curve",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Power curve CSV (default: bundled Nordex N100/2500).",
    )(fn)
    fn = click.option(
        "--load",
        "load_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Load profile CSV (default: bundled dishwasher).",
    )(fn)
    fn = click.option("--hub-height", type=float, default=100.0, show_default=True)(fn)
    fn = click.option("--reference-height", type=float, default=10.0, show_default=True)(fn)
    fn = click.option("--alpha", type=float, default=1.0 / 7.0, show_default="1/7")(fn)
    fn = click.option(
        "--kernel",
        type=click.Choice(sorted(simulate.KERNELS)),
        default="fast",
        show_default=True,
    )(fn)
    fn = click.option(
        "--starts",
        "starts_per_year",
        type=int,
        default=simulate.STARTS_PER_YEAR,
        show_default=True,
        help="Candidate start instants per station.",
    )(fn)
    fn = click.option("--jobs", type=int, default=1, show_default=True)(fn)
    return fn


def out_dir_option(fn):
    return click.option(
        "--out",
        "out_dir",
        required=True,
        type=click.Path(file_okay=False, path_type=Path),
        help="Output directory.",
    )(fn)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable info logging.")
def main(verbose: bool) -> None:
    """Wind-power feasibility atlas from 10-minute station observations."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _run_guarded(make_config, steps) -> None:
    try:
        steps(make_config())
    except (PipelineError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("ingest")
@station_dir_option
@common_ingest_options
@out_dir_option
@click.option("--dump-imputed", is_flag=True, help="Write per-station slot,speed,imputed CSVs.")
def ingest_cmd(station_dir, input_format, threshold, out_dir, dump_imputed) -> None:
    """Parse station files, report missing fractions and the kept/excluded split."""

    def steps(config: RunConfig) -> None:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        files = pipeline.discover_station_files(config)
        mapping = ingest.MAPPINGS[config.input_format]
        results = []
        for path in files:
            hint = path.stem if mapping.station_id is None else None
            table = ingest.parse_station_csv(path, mapping, hint)
            fraction = ingest.missing_fraction(table)
            kept = fraction <= config.missing_threshold
            results.append(
                pipeline.StationResult(
                    station_id=table.station_id,
                    n_slots=table.n_slots,
                    n_missing=table.n_missing,
                    missing_fraction=fraction,
                    kept=kept,
                )
            )
            if kept and config.dump_imputed:
                from .timeseries import imputation_dump_csv, impute_linear

                dump_dir = config.out_dir / "imputed"
                dump_dir.mkdir(exist_ok=True)
                series = impute_linear(table)
                (dump_dir / f"{table.station_id}.csv").write_text(
                    imputation_dump_csv(series), encoding="utf-8"
                )
        report = pipeline.write_ingest_report(config.out_dir, results)
        click.echo(f"wrote {report}")

    _run_guarded(
        lambda: RunConfig(
            station_dir=station_dir,
            out_dir=out_dir,
            input_format=input_format,
            missing_threshold=threshold,
            dump_imputed=dump_imputed,
        ),
        steps,
    )


@main.command("simulate")
@station_dir_option
@common_ingest_options
@simulation_options
@out_dir_option
@click.option("--battery-wh", type=float, required=True, help="Battery capacity in Wh.")
def simulate_cmd(
    station_dir,
    input_format,
    threshold,
    power_curve,
    load_path,
    hub_height,
    reference_height,
    alpha,
    kernel,
    starts_per_year,
    jobs,
    out_dir,
    battery_wh,
) -> None:
    """Scan every station at one battery capacity; write station_id,rho."""

    def steps(config: RunConfig) -> None:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        files = pipeline.discover_station_files(config)
        results = pipeline.process_stations(config)
        path = pipeline.write_station_rho(config.out_dir, results)
        pipeline.write_manifest(config, files, {})
        click.echo(f"wrote {path}")

    _run_guarded(
        lambda: RunConfig(
            station_dir=station_dir,
            out_dir=out_dir,
            input_format=input_format,
            power_curve_path=power_curve,
            reference_height=reference_height,
            hub_height=hub_height,
            alpha=alpha,
            load_path=load_path,
            capacities_wh=(battery_wh,),
            kernel=kernel,
            missing_threshold=threshold,
            starts_per_year=starts_per_year,
            jobs=jobs,
        ),
        steps,
    )


@main.command("sweep")
@station_dir_option
@common_ingest_options
@simulation_options
@out_dir_option
@click.option(
    "--capacities",
    default="200,500,800,1000,1500,2000",
    show_default=True,
    help="Comma-separated battery capacities in Wh.",
)
def sweep_cmd(
    station_dir,
    input_format,
    threshold,
    power_curve,
    load_path,
    hub_height,
    reference_height,
    alpha,
    kernel,
    starts_per_year,
    jobs,
    out_dir,
    capacities,
) -> None:
    """Cross-station rho statistics over a list of battery capacities."""

    def steps(config: RunConfig) -> None:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        files = pipeline.discover_station_files(config)
        results = pipeline.process_stations(config)
        rows = pipeline.sweep_from_results(config, results)
        path = pipeline.write_sweep(config.out_dir, rows)
        pipeline.write_manifest(config, files, {})
        click.echo(f"wrote {path}")

    _run_guarded(
        lambda: RunConfig(
            station_dir=station_dir,
            out_dir=out_dir,
            input_format=input_format,
            power_curve_path=power_curve,
            reference_height=reference_height,
            hub_height=hub_height,
            alpha=alpha,
            load_path=load_path,
            capacities_wh=_parse_capacities(capacities),
            kernel=kernel,
            missing_threshold=threshold,
            starts_per_year=starts_per_year,
            jobs=jobs,
        ),
        steps,
    )


@main.command("analyze")
@station_dir_option
@common_ingest_options
@simulation_options
@out_dir_option
@click.option("--battery-wh", type=float, required=True, help="Battery capacity in Wh.")
def analyze_cmd(
    station_dir,
    input_format,
    threshold,
    power_curve,
    load_path,
    hub_height,
    reference_height,
    alpha,
    kernel,
    starts_per_year,
    jobs,
    out_dir,
    battery_wh,
) -> None:
    """Hourly/monthly suitable-start structure and entropy per station."""

    def steps(config: RunConfig) -> None:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        files = pipeline.discover_station_files(config)
        results = pipeline.process_stations(config)
        paths = pipeline.write_analysis(config.out_dir, results)
        pipeline.write_station_rho(config.out_dir, results)
        pipeline.write_manifest(config, files, {})
        click.echo("wrote " + ", ".join(str(p) for p in paths))

    _run_guarded(
        lambda: RunConfig(
            station_dir=station_dir,
            out_dir=out_dir,
            input_format=input_format,
            power_curve_path=power_curve,
            reference_height=reference_height,
            hub_height=hub_height,
            alpha=alpha,
            load_path=load_path,
            capacities_wh=(battery_wh,),
            kernel=kernel,
            missing_threshold=threshold,
            starts_per_year=starts_per_year,
            jobs=jobs,
        ),
        steps,
    )


@main.command("atlas")
@click.option(
    "--results",
    "results_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Directory holding station_rho.csv and analysis CSVs.",
)
@click.option(
    "--catalog",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Station catalog CSV (station_id,name,latitude,longitude).",
)
@click.option(
    "--out",
    "out_prefix",
    required=True,
    type=click.Path(path_type=Path),
    help="Output prefix; writes PREFIX.csv, PREFIX.geojson, PREFIX.svg.",
)
@click.option("--battery-wh", type=float, default=None, help="Override the manifest capacity.")
@click.option("--load-name", default=None, help="Override the manifest load name.")
def atlas_cmd(results_dir, catalog, out_prefix, battery_wh, load_name) -> None:
    """Assemble atlas artifacts from a results directory."""
    try:
        rho_path = results_dir / "station_rho.csv"
        if not rho_path.exists():
            raise PipelineError(f"{rho_path} not found; run 'simulate' or 'run' first")
        with open(rho_path, encoding="utf-8") as handle:
            rhos = {row["station_id"]: float(row["rho"]) for row in csv.DictReader(handle)}

        entropies: dict[str, float | None] = {}
        entropy_path = results_dir / "entropy.csv"
        if entropy_path.exists():
            with open(entropy_path, encoding="utf-8") as handle:
                for row in csv.DictReader(handle):
                    raw = row["normalized_entropy"]
                    entropies[row["station_id"]] = float(raw) if raw else None

        manifest_path = results_dir / "manifest.json"
        capacity = battery_wh
        load = load_name
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            if capacity is None:
                capacity = manifest["config"]["capacities_wh"][0]
            if load is None:
                load = Path(str(manifest["config"]["load"])).stem
        if capacity is None or load is None:
            raise PipelineError(
                "no manifest.json in results dir; pass --battery-wh and --load-name"
            )

        metas = {m.station_id: m for m in ingest.load_station_catalog(catalog)}
        entries = []
        for station_id, rho in rhos.items():
            meta = metas.get(station_id)
            if meta is None:
                click.echo(f"warning: station {station_id} not in catalog; skipped", err=True)
                continue
            entries.append(
                atlas_mod.StationAtlasEntry(
                    meta=meta,
                    rho=rho,
                    normalized_entropy=entropies.get(station_id),
                    hourly_counts=np.zeros(24, dtype=int),
                    monthly_counts=np.zeros(12, dtype=int),
                    battery_capacity_wh=float(capacity),
                    load_name=str(load),
                )
            )
        if not entries:
            raise PipelineError("no stations with both rho and catalog coordinates")
        paths = pipeline.write_atlas_files(out_prefix, entries)
        click.echo("wrote " + ", ".join(str(p) for p in paths))
    except (PipelineError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


#: JSON config keys accepted by ``run --config`` and their RunConfig fields.
_CONFIG_FILE_KEYS = {
    "station_dir": "station_dir",
    "catalog": "catalog_path",
    "out": "out_dir",
    "input_format": "input_format",
    "threshold": "missing_threshold",
    "power_curve": "power_curve_path",
    "load": "load_path",
    "reference_height": "reference_height",
    "hub_height": "hub_height",
    "alpha": "alpha",
    "kernel": "kernel",
    "starts": "starts_per_year",
    "jobs": "jobs",
    "capacities": "capacities_wh",
    "dump_imputed": "dump_imputed",
}

_PATH_FIELDS = {"station_dir", "catalog_path", "out_dir", "power_curve_path", "load_path"}


def _merged_run_config(ctx: click.Context, config_file: Path | None, flags: dict) -> RunConfig:
    """Config-file values seeded first, then any explicitly passed flag wins."""
    merged: dict = {}
    if config_file is not None:
        raw = json.loads(config_file.read_text(encoding="utf-8"))
        unknown = set(raw) - set(_CONFIG_FILE_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            merged[_CONFIG_FILE_KEYS[key]] = value

    from click.core import ParameterSource

    for name, (field, value) in flags.items():
        source = ctx.get_parameter_source(name)
        if source != ParameterSource.DEFAULT or field not in merged:
            merged[field] = value

    if merged.get("station_dir") is None:
        raise ValueError("no station directory (give --station-dir or a config file)")
    if merged.get("out_dir") is None:
        raise ValueError("no output directory (give --out or a config file)")
    capacities = merged.get("capacities_wh", (1000.0,))
    if isinstance(capacities, str):
        capacities = _parse_capacities(capacities)
    merged["capacities_wh"] = tuple(float(c) for c in capacities)
    for field in _PATH_FIELDS:
        if merged.get(field) is not None:
            merged[field] = Path(merged[field])
    return RunConfig(**merged)


@main.command("run")
@click.pass_context
@click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="JSON run configuration; explicit flags override its values.",
)
@click.option(
    "--station-dir",
    envvar=DATA_DIR_ENV,
    default=None,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help=f"Directory of station observation CSVs (default: ${DATA_DIR_ENV}).",
)
@common_ingest_options
@simulation_options
@click.option(
    "--out",
    "out_dir",
    default=None,
    type=click.Path(file_okay=False, path_type=Path),
    help="Output directory.",
)
@click.option(
    "--catalog",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Station catalog CSV; required for the atlas outputs.",
)
@click.option(
    "--capacities",
    default="1000",
    show_default=True,
    help="Comma-separated capacities in Wh; the first one builds the atlas.",
)
@click.option("--dump-imputed", is_flag=True)
def run_cmd(
    ctx,
    config_file,
    station_dir,
    input_format,
    threshold,
    power_curve,
    load_path,
    hub_height,
    reference_height,
    alpha,
    kernel,
    starts_per_year,
    jobs,
    out_dir,
    catalog,
    capacities,
    dump_imputed,
) -> None:
    """Full pipeline: ingest, filter, impute, power, scan, analyze, atlas."""

    def steps(config: RunConfig) -> None:
        output = pipeline.run_pipeline(config)
        kept = sum(1 for r in output.results if r.kept)
        click.echo(f"{kept}/{len(output.results)} stations kept")
        for path in output.written:
            click.echo(f"wrote {path}")

    flags = {
        "station_dir": ("station_dir", station_dir),
        "out_dir": ("out_dir", out_dir),
        "catalog": ("catalog_path", catalog),
        "input_format": ("input_format", input_format),
        "threshold": ("missing_threshold", threshold),
        "power_curve": ("power_curve_path", power_curve),
        "load_path": ("load_path", load_path),
        "reference_height": ("reference_height", reference_height),
        "hub_height": ("hub_height", hub_height),
        "alpha": ("alpha", alpha),
        "kernel": ("kernel", kernel),
        "starts_per_year": ("starts_per_year", starts_per_year),
        "jobs": ("jobs", jobs),
        "capacities": ("capacities_wh", _parse_capacities(capacities)),
        "dump_imputed": ("dump_imputed", dump_imputed),
    }
    _run_guarded(lambda: _merged_run_config(ctx, config_file, flags), steps)


if __name__ == "__main__":
    main()
