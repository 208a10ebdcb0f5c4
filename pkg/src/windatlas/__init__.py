"""Wind-power feasibility atlas from 10-minute weather-station observations.

Pipeline: parse station files -> exclude stations with too many gaps ->
impute the rest -> extrapolate 10 m speeds to hub height -> convert to
turbine power -> scan every 10-minute start instant of the year for
battery-backed load feasibility -> aggregate and export the atlas.
"""

__version__ = "0.1.0"

from .analysis import (
    SummaryStats,
    TemporalDistribution,
    hourly_entropy,
    monthly_distribution,
    monthly_mean_speed,
    summarize,
    temporal_distribution,
)
from .atlas import MapStyle, StationAtlasEntry, atlas_to_csv, to_geojson, to_svg_map
from .ingest import (
    CANONICAL_MAPPING,
    FMI_MAPPING,
    ColumnMapping,
    IngestError,
    RawObservationTable,
    RowError,
    SchemaError,
    StationMeta,
    filter_stations,
    load_station_catalog,
    missing_fraction,
    parse_station_csv,
    serialize_station_csv,
)
from .loads import (
    LoadProfile,
    demand_at,
    dishwasher_profile,
    household_profile,
    load_profile_from_csv,
    load_profile_to_csv,
)
from .pipeline import PipelineError, RunConfig, run_pipeline
from .power import (
    HeightExtrapolation,
    PowerCurve,
    WindPowerSeries,
    default_power_curve,
    extrapolate_speed,
    power_at_speed,
    power_curve_from_csv,
    speeds_to_power,
)
from .simulate import (
    STARTS_PER_YEAR,
    SimulationConfig,
    SuitabilityResult,
    SweepRow,
    battery_trace,
    capacity_sweep,
    simulate_start,
    useful_fraction,
    useful_fraction_fast,
)
from .timeseries import WindSpeedSeries, impute_linear
