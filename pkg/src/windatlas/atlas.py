"""Atlas exports: per-station results as CSV, GeoJSON and an SVG map.

The SVG map places one circle per station with an equirectangular
projection of latitude/longitude into the canvas; the circle radius scales
linearly with the station's useful fraction. The default projection bounds
cover Finland.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .ingest import StationMeta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StationAtlasEntry:
    """Everything the atlas records about one station."""

    meta: StationMeta
    rho: float
    normalized_entropy: float | None
    hourly_counts: np.ndarray
    monthly_counts: np.ndarray
    battery_capacity_wh: float
    load_name: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho {self.rho} outside [0, 1]")


@dataclass(frozen=True)
class MapStyle:
    """Canvas size, projection bounds and marker scaling for the SVG map."""

    width: float = 600.0
    height: float = 880.0
    margin: float = 30.0
    lon_min: float = 19.0
    lon_max: float = 32.0
    lat_min: float = 59.0
    lat_max: float = 70.5
    max_radius: float = 12.0
    omit_zero: bool = False
    marker_color: str = "#c0392b"
    marker_opacity: float = 0.75


def to_geojson(entries: Sequence[StationAtlasEntry]) -> bytes:
    """Serialize entries as a GeoJSON FeatureCollection of Point features.

    Coordinates are (longitude, latitude); numeric properties keep full
    float precision so parsing the output recovers them exactly.
    """
    if not entries:
        raise ValueError("no atlas entries to export")
    features = []
    for entry in entries:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [entry.meta.longitude, entry.meta.latitude],
                },
                "properties": {
                    "station_id": entry.meta.station_id,
                    "name": entry.meta.name,
                    "rho": entry.rho,
                    "entropy": entry.normalized_entropy,
                    "battery_wh": entry.battery_capacity_wh,
                    "load": entry.load_name,
                },
            }
        )
    collection = {"type": "FeatureCollection", "features": features}
    return json.dumps(collection, indent=2).encode("utf-8")


def _project(style: MapStyle, latitude: float, longitude: float) -> tuple[float, float, bool]:
    """Equirectangular projection into the canvas; flags out-of-bounds points."""
    inside = style.lon_min <= longitude <= style.lon_max and style.lat_min <= latitude <= style.lat_max
    span_x = style.width - 2 * style.margin
    span_y = style.height - 2 * style.margin
    x = style.margin + (longitude - style.lon_min) / (style.lon_max - style.lon_min) * span_x
    y = style.margin + (style.lat_max - latitude) / (style.lat_max - style.lat_min) * span_y
    x = min(max(x, 0.0), style.width)
    y = min(max(y, 0.0), style.height)
    return x, y, inside


def to_svg_map(entries: Sequence[StationAtlasEntry], style: MapStyle = MapStyle()) -> bytes:
    """Render entries as an SVG map with fraction-scaled circular markers."""
    if not entries:
        raise ValueError("no atlas entries to export")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width:g}" '
        f'height="{style.height:g}" viewBox="0 0 {style.width:g} {style.height:g}">',
        f'  <rect width="{style.width:g}" height="{style.height:g}" fill="#ffffff"/>',
    ]
    for entry in entries:
        x, y, inside = _project(style, entry.meta.latitude, entry.meta.longitude)
        if not inside:
            logger.warning(
                "station %s at (%.4f, %.4f) outside projection bounds; marker clipped",
                entry.meta.station_id,
                entry.meta.latitude,
                entry.meta.longitude,
            )
        radius = style.max_radius * entry.rho
        if radius == 0.0 and style.omit_zero:
            continue
        title = escape(f"{entry.meta.name} ({entry.meta.station_id}): rho={entry.rho:.4f}")
        lines.append(
            f'  <circle cx="{x:.2f}" cy="{y:.2f}" r="{radius!r}" '
            f'fill="{style.marker_color}" fill-opacity="{style.marker_opacity:g}">'
            f"<title>{title}</title></circle>"
        )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def atlas_to_csv(entries: Sequence[StationAtlasEntry]) -> str:
    """Tabular atlas: one row per station, rho rendered at 4 decimals."""
    if not entries:
        raise ValueError("no atlas entries to export")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        [
            "station_id",
            "name",
            "latitude",
            "longitude",
            "rho",
            "normalized_entropy",
            "battery_wh",
            "load",
        ]
    )
    for entry in entries:
        entropy = "" if entry.normalized_entropy is None else f"{entry.normalized_entropy:.6f}"
        writer.writerow(
            [
                entry.meta.station_id,
                entry.meta.name,
                repr(entry.meta.latitude),
                repr(entry.meta.longitude),
                f"{entry.rho:.4f}",
                entropy,
                f"{entry.battery_capacity_wh:g}",
                entry.load_name,
            ]
        )
    return out.getvalue()
