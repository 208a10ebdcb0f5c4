"""Station observation parsing, missing-value accounting and station filtering.

Observation files are CSV exports covering one station each. Two layouts are
supported: the canonical layout (``station_id,timestamp_iso8601,wind_speed_ms``)
and the FMI open-data export layout with separate Year/m/d/Time columns. A
:class:`ColumnMapping` describes how columns map onto timestamp and speed
roles, so further layouts can be adapted without touching the parser.

Parsed tables are canonicalized to a complete 10-minute grid between the first
and last observed timestamp; slots without a usable observation hold NaN.
Negative speeds count as missing. Timestamps are taken as written in the file
and never converted between timezones.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

STEP = timedelta(minutes=10)


class IngestError(ValueError):
    """Base error for malformed station input files."""


class SchemaError(IngestError):
    """Header does not provide the columns the mapping requires."""


class RowError(IngestError):
    """A data row could not be used; the message carries the line number."""


@dataclass(frozen=True)
class StationMeta:
    """Identity and WGS84 position of one weather station."""

    station_id: str
    name: str
    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")


@dataclass(frozen=True)
class RawObservationTable:
    """One station's 10 m wind observations on a complete 10-minute grid.

    ``speeds`` is a float64 array with one entry per grid slot; NaN marks a
    missing observation (absent row, unparseable value, or negative speed).
    Negative numbers never appear: they are converted to NaN on ingest.
    """

    station_id: str
    start: datetime
    speeds: np.ndarray

    def __post_init__(self) -> None:
        speeds = np.asarray(self.speeds, dtype=np.float64)
        object.__setattr__(self, "speeds", speeds)
        if speeds.ndim != 1:
            raise ValueError("speeds must be a 1-d array")
        with np.errstate(invalid="ignore"):
            if np.any(speeds < 0):
                raise ValueError("negative speeds must be stored as NaN, not numbers")

    @property
    def n_slots(self) -> int:
        return len(self.speeds)

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.speeds).sum())

    def timestamp_at(self, slot: int) -> datetime:
        return self.start + slot * STEP

    def timestamps(self) -> list[datetime]:
        return [self.start + i * STEP for i in range(self.n_slots)]


@dataclass(frozen=True)
class ColumnMapping:
    """Maps CSV column names onto the timestamp and speed roles.

    Either ``timestamp`` names a single ISO-8601 column, or the split
    ``year``/``month``/``day``/``time`` columns are all named. A ``timezone``
    column, when present, is accepted but its value is not interpreted: the
    wall-clock timestamps are kept exactly as written.
    """

    speed: str
    timestamp: str | None = None
    station_id: str | None = None
    year: str | None = None
    month: str | None = None
    day: str | None = None
    time: str | None = None
    timezone: str | None = None

    def required_columns(self) -> list[str]:
        if self.timestamp is not None:
            cols = [self.timestamp, self.speed]
        else:
            if None in (self.year, self.month, self.day, self.time):
                raise ValueError(
                    "mapping needs either a timestamp column or all of "
                    "year/month/day/time"
                )
            cols = [self.year, self.month, self.day, self.time, self.speed]
        if self.station_id is not None:
            cols.insert(0, self.station_id)
        return cols  # type: ignore[return-value]


CANONICAL_MAPPING = ColumnMapping(
    speed="wind_speed_ms",
    timestamp="timestamp_iso8601",
    station_id="station_id",
)

#: Layout of FMI open-data CSV exports (one file per station).
FMI_MAPPING = ColumnMapping(
    speed="Wind speed (m/s)",
    year="Year",
    month="m",
    day="d",
    time="Time",
    timezone="Time zone",
)

MAPPINGS = {"canonical": CANONICAL_MAPPING, "fmi": FMI_MAPPING}


def _as_text(source: bytes | str | Path | TextIO) -> TextIO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, Path):
        return io.StringIO(source.read_text(encoding="utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def _parse_speed(raw: str) -> float:
    """Missing, unparseable and negative speeds all become NaN."""
    raw = raw.strip()
    if not raw or raw == "-":
        return math.nan
    try:
        value = float(raw)
    except ValueError:
        return math.nan
    if math.isnan(value) or value < 0.0:
        return math.nan
    return value


def _parse_timestamp(row: dict[str, str], mapping: ColumnMapping, lineno: int) -> datetime:
    try:
        if mapping.timestamp is not None:
            stamp = datetime.fromisoformat(row[mapping.timestamp].strip())
            if stamp.tzinfo is not None:
                stamp = stamp.replace(tzinfo=None)
        else:
            clock = row[mapping.time].strip()  # type: ignore[index]
            parts = clock.split(":")
            hour, minute = int(parts[0]), int(parts[1])
            second = int(parts[2]) if len(parts) > 2 else 0
            stamp = datetime(
                int(row[mapping.year]),  # type: ignore[index]
                int(row[mapping.month]),  # type: ignore[index]
                int(row[mapping.day]),  # type: ignore[index]
                hour,
                minute,
                second,
            )
    except (ValueError, KeyError) as exc:
        raise RowError(f"line {lineno}: unparseable timestamp ({exc})") from exc
    if stamp.minute % 10 != 0 or stamp.second != 0 or stamp.microsecond != 0:
        raise RowError(f"line {lineno}: timestamp {stamp} not on the 10-minute grid")
    return stamp


def parse_station_csv(
    source: bytes | str | Path | TextIO,
    mapping: ColumnMapping = CANONICAL_MAPPING,
    station_id: str | None = None,
) -> RawObservationTable:
    """Parse one station observation file onto the canonical 10-minute grid.

    Parameters
    ----------
    source : bytes, str, Path or file-like
        UTF-8 CSV content with a header row.
    mapping : ColumnMapping
        Column layout of the file; defaults to the canonical layout.
    station_id : str, optional
        Station identifier when the file has no station column (e.g. FMI
        exports, where the id lives in the filename).

    Returns
    -------
    RawObservationTable
        Grid-complete table; slots absent from the file, with unparseable
        speeds, or with negative speeds hold NaN.

    Raises
    ------
    SchemaError
        Header is missing a column the mapping requires.
    RowError
        A timestamp is unparseable, off the 10-minute grid, or duplicated.
    IngestError
        The file holds no data rows, or station ids are inconsistent.
    """
    reader = csv.reader(_as_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file: missing header row") from None
    header = [h.strip() for h in header]
    for column in mapping.required_columns():
        if column not in header:
            raise SchemaError(f"missing required column {column!r}")
    index = {name: header.index(name) for name in header}

    observations: dict[datetime, float] = {}
    file_station: str | None = None
    for lineno, raw_row in enumerate(reader, start=2):
        if not raw_row or all(not cell.strip() for cell in raw_row):
            continue
        if len(raw_row) < len(header):
            raise RowError(f"line {lineno}: expected {len(header)} fields, got {len(raw_row)}")
        row = {name: raw_row[index[name]] for name in header}
        if mapping.station_id is not None:
            sid = row[mapping.station_id].strip()
            if file_station is None:
                file_station = sid
            elif sid != file_station:
                raise RowError(
                    f"line {lineno}: station id {sid!r} differs from {file_station!r}; "
                    "one file must cover one station"
                )
        stamp = _parse_timestamp(row, mapping, lineno)
        if stamp in observations:
            raise RowError(f"line {lineno}: duplicate timestamp {stamp}")
        observations[stamp] = _parse_speed(row[mapping.speed])

    if not observations:
        raise IngestError("file holds no data rows")

    resolved_id = station_id or file_station
    if resolved_id is None:
        raise IngestError("station id not in file and not supplied")

    start = min(observations)
    last = max(observations)
    n_slots = (last - start) // STEP + 1
    speeds = np.full(n_slots, np.nan)
    for stamp, value in observations.items():
        offset = stamp - start
        if offset % STEP != timedelta(0):
            raise RowError(f"timestamp {stamp} not aligned with grid starting {start}")
        speeds[offset // STEP] = value
    return RawObservationTable(station_id=resolved_id, start=start, speeds=speeds)


def serialize_station_csv(table: RawObservationTable) -> str:
    """Write a table back to the canonical CSV layout (missing slots empty)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["station_id", "timestamp_iso8601", "wind_speed_ms"])
    for slot, value in enumerate(table.speeds):
        cell = "" if math.isnan(value) else repr(float(value))
        writer.writerow([table.station_id, table.timestamp_at(slot).isoformat(sep=" "), cell])
    return out.getvalue()


def missing_fraction(table: RawObservationTable) -> float:
    """Fraction of grid slots without a usable observation."""
    if table.n_slots == 0:
        raise IngestError("empty table has no missing fraction")
    return table.n_missing / table.n_slots


def filter_stations(
    tables: Iterable[RawObservationTable],
    threshold: float = 0.03,
) -> tuple[list[RawObservationTable], list[RawObservationTable]]:
    """Split stations into (kept, excluded) by missing-data fraction.

    A station is kept when its missing fraction is at most ``threshold``
    (exclusion applies to *more than* the threshold). Input order is
    preserved on both sides.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    kept: list[RawObservationTable] = []
    excluded: list[RawObservationTable] = []
    for table in tables:
        if missing_fraction(table) <= threshold:
            kept.append(table)
        else:
            excluded.append(table)
    return kept, excluded


def load_station_catalog(source: bytes | str | Path | TextIO) -> list[StationMeta]:
    """Read the station catalog CSV (``station_id,name,latitude,longitude``)."""
    reader = csv.DictReader(_as_text(source))
    required = {"station_id", "name", "latitude", "longitude"}
    if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
        raise SchemaError(f"station catalog needs columns {sorted(required)}")
    catalog: list[StationMeta] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        sid = row["station_id"].strip()
        if sid in seen:
            raise RowError(f"line {lineno}: duplicate station id {sid!r}")
        seen.add(sid)
        try:
            meta = StationMeta(
                station_id=sid,
                name=row["name"].strip(),
                latitude=float(row["latitude"]),
                longitude=float(row["longitude"]),
            )
        except ValueError as exc:
            raise RowError(f"line {lineno}: {exc}") from exc
        catalog.append(meta)
    return catalog
