import json
import logging
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from windatlas import MapStyle, StationAtlasEntry, StationMeta, atlas_to_csv, to_geojson, to_svg_map


def make_entry(station_id="A", name="Alpha", lat=60.5, lon=25.0, rho=0.75, entropy=0.98):
    return StationAtlasEntry(
        meta=StationMeta(station_id, name, lat, lon),
        rho=rho,
        normalized_entropy=entropy,
        hourly_counts=np.full(24, 10),
        monthly_counts=np.full(12, 20),
        battery_capacity_wh=1000.0,
        load_name="dishwasher",
    )


class TestGeojson:
    def test_single_entry_feature(self):
        data = json.loads(to_geojson([make_entry()]))
        assert data["type"] == "FeatureCollection"
        assert len(data["features"]) == 1
        feature = data["features"][0]
        assert feature["geometry"]["type"] == "Point"
        # GeoJSON is (longitude, latitude)
        assert feature["geometry"]["coordinates"] == [25.0, 60.5]
        props = feature["properties"]
        assert props["station_id"] == "A"
        assert props["battery_wh"] == 1000.0
        assert props["load"] == "dishwasher"

    def test_roundtrip_preserves_rho_exactly(self, rng):
        entries = [
            make_entry(station_id=f"S{i}", rho=float(rng.uniform(0, 1)))
            for i in range(20)
        ]
        data = json.loads(to_geojson(entries))
        for entry, feature in zip(entries, data["features"]):
            assert feature["properties"]["rho"] == entry.rho
            assert feature["properties"]["entropy"] == entry.normalized_entropy

    def test_165_entries_give_165_features(self):
        entries = [make_entry(station_id=f"S{i}", lat=60 + i * 0.05) for i in range(165)]
        data = json.loads(to_geojson(entries))
        assert len(data["features"]) == 165

    def test_undefined_entropy_is_null(self):
        entry = StationAtlasEntry(
            meta=StationMeta("A", "Alpha", 60.0, 25.0),
            rho=0.0,
            normalized_entropy=None,
            hourly_counts=np.zeros(24, dtype=int),
            monthly_counts=np.zeros(12, dtype=int),
            battery_capacity_wh=500.0,
            load_name="x",
        )
        data = json.loads(to_geojson([entry]))
        assert data["features"][0]["properties"]["entropy"] is None

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            to_geojson([])


class TestSvgMap:
    def test_well_formed_xml(self):
        entries = [make_entry(station_id=f"S{i}", lat=60 + i, rho=0.1 * i) for i in range(5)]
        root = ET.fromstring(to_svg_map(entries).decode("utf-8"))
        assert root.tag.endswith("svg")

    def test_radius_scales_linearly(self):
        entries = [make_entry(station_id="H", rho=0.5), make_entry(station_id="F", rho=1.0)]
        root = ET.fromstring(to_svg_map(entries).decode("utf-8"))
        circles = [el for el in root.iter() if el.tag.endswith("circle")]
        radii = [float(c.attrib["r"]) for c in circles]
        assert radii[0] / radii[1] == 0.5

    def test_zero_rho_zero_radius(self):
        root = ET.fromstring(to_svg_map([make_entry(rho=0.0)]).decode("utf-8"))
        circles = [el for el in root.iter() if el.tag.endswith("circle")]
        assert float(circles[0].attrib["r"]) == 0.0

    def test_zero_rho_can_be_omitted(self):
        style = MapStyle(omit_zero=True)
        root = ET.fromstring(to_svg_map([make_entry(rho=0.0)], style).decode("utf-8"))
        circles = [el for el in root.iter() if el.tag.endswith("circle")]
        assert not circles

    def test_radius_strictly_increasing_in_rho(self):
        rhos = [0.1, 0.2, 0.5, 0.9, 1.0]
        entries = [make_entry(station_id=f"S{i}", rho=r) for i, r in enumerate(rhos)]
        root = ET.fromstring(to_svg_map(entries).decode("utf-8"))
        radii = [
            float(el.attrib["r"]) for el in root.iter() if el.tag.endswith("circle")
        ]
        assert radii == sorted(radii)
        assert len(set(radii)) == len(radii)

    def test_out_of_bounds_station_warns_and_clips(self, caplog):
        entry = make_entry(lat=40.0, lon=5.0)  # far outside the Finland box
        with caplog.at_level(logging.WARNING):
            payload = to_svg_map([entry]).decode("utf-8")
        assert "clipped" in caplog.text
        root = ET.fromstring(payload)
        circle = next(el for el in root.iter() if el.tag.endswith("circle"))
        style = MapStyle()
        assert 0.0 <= float(circle.attrib["cx"]) <= style.width
        assert 0.0 <= float(circle.attrib["cy"]) <= style.height

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            to_svg_map([])


class TestAtlasCsv:
    def test_four_decimal_rho(self):
        text = atlas_to_csv([make_entry(rho=1 / 3)])
        lines = text.strip().splitlines()
        assert lines[0].startswith("station_id,name")
        assert ",0.3333," in lines[1]

    def test_undefined_entropy_blank(self):
        entry = StationAtlasEntry(
            meta=StationMeta("A", "Alpha", 60.0, 25.0),
            rho=0.0,
            normalized_entropy=None,
            hourly_counts=np.zeros(24, dtype=int),
            monthly_counts=np.zeros(12, dtype=int),
            battery_capacity_wh=500.0,
            load_name="x",
        )
        line = atlas_to_csv([entry]).strip().splitlines()[1]
        assert ",0.0000,,500," in line


def test_rho_out_of_range_rejected():
    with pytest.raises(ValueError):
        make_entry(rho=1.5)
