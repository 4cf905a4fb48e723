"""Manifest loading, GeoJSON ingestion and marker mapping."""

import itertools
import json

import pytest

from heritage_forge.errors import (
    DanglingReferenceError,
    DomainError,
    DuplicateIdError,
    GeoJsonError,
    ManifestSyntaxError,
    SchemaError,
)
from heritage_forge.model import (
    ErrorCollector,
    GeoPoint,
    LocalizedText,
    load_manifest,
    manifest_to_dict,
    markers_from_features,
    parse_feature_collection,
)

from conftest import make_fixture_site


def _point_feature(marker_id, kind="info", title="T", lonlat=(-2.47, 41.77), **props):
    return {
        "type": "Feature",
        "id": marker_id,
        "geometry": {"type": "Point", "coordinates": list(lonlat)},
        "properties": {"kind": kind, "title": title, **props},
    }


# --- parse_feature_collection --------------------------------------------------


def test_empty_collection():
    assert parse_feature_collection(b'{"type":"FeatureCollection","features":[]}') == []


def test_single_point_feature_against_independent_reader():
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [-2.47, 41.77]},
                "properties": {"kind": "pano360", "title": "Cloister"},
            }
        ],
    }
    raw = json.dumps(doc).encode()
    features = parse_feature_collection(raw)
    # Oracle: plain json round-trip of the same bytes.
    reference = json.loads(raw.decode())["features"]
    assert features == reference
    assert features[0]["properties"] == {"kind": "pano360", "title": "Cloister"}
    assert features[0]["geometry"]["coordinates"] == [-2.47, 41.77]  # lon first


def test_linestring_rejected():
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 1]]},
                "properties": {},
            }
        ],
    }
    with pytest.raises(GeoJsonError, match="must be Point"):
        parse_feature_collection(json.dumps(doc).encode())


def test_not_a_feature_collection():
    with pytest.raises(GeoJsonError):
        parse_feature_collection(b'{"type":"Feature"}')


def test_invalid_json_reports_position():
    with pytest.raises(ManifestSyntaxError) as exc:
        parse_feature_collection(b'{"type": }')
    assert exc.value.line == 1
    assert exc.value.column is not None


def test_missing_coordinates():
    doc = {
        "type": "FeatureCollection",
        "features": [{"type": "Feature", "geometry": {"type": "Point"}, "properties": {}}],
    }
    with pytest.raises(GeoJsonError, match="coordinates"):
        parse_feature_collection(json.dumps(doc).encode())


def test_not_utf8():
    with pytest.raises(ManifestSyntaxError):
        parse_feature_collection(b"\xff\xfe{}")


# --- markers_from_features -------------------------------------------------------


def test_one_marker_per_kind():
    feats = [
        _point_feature("m1", "model3d", media=["a"]),
        _point_feature("m2", "pano360", media=["b"]),
        _point_feature("m3", "info"),
        _point_feature("m4", "video", media=["c"]),
    ]
    markers = markers_from_features(feats, "camp")
    assert {m.kind for m in markers} == {"model3d", "pano360", "info", "video"}
    assert all(m.layer_id == "camp" for m in markers)


def test_duplicate_marker_id():
    feats = [_point_feature("nave"), _point_feature("nave")]
    with pytest.raises(DuplicateIdError, match="nave"):
        markers_from_features(feats, "camp")


def test_unknown_kind():
    with pytest.raises(SchemaError, match="unknown kind"):
        markers_from_features([_point_feature("x", kind="hologram")], "camp")


def test_missing_title():
    feat = _point_feature("x")
    del feat["properties"]["title"]
    with pytest.raises(SchemaError, match="title"):
        markers_from_features([feat], "camp")


def test_non_info_requires_media():
    with pytest.raises(SchemaError, match="at least one asset"):
        markers_from_features([_point_feature("x", kind="video")], "camp")


def test_nav_order_sorting_example():
    feats = [
        _point_feature("b", nav_order=2),
        _point_feature("a", nav_order=1),
        _point_feature("c"),
    ]
    markers = markers_from_features(feats, "l")
    assert [m.marker_id for m in markers] == ["a", "b", "c"]
    assert [m.nav_order for m in markers] == [1, 2, None]


def _reference_order(specs):
    """Brute-force ordering oracle: stable sort by the documented key."""
    indexed = list(enumerate(specs))
    ordered = sorted(
        (x for x in indexed if x[1][1] is not None), key=lambda x: (x[1][1], x[1][0])
    )
    unordered = [x for x in indexed if x[1][1] is None]
    return [marker_id for _, (marker_id, _) in ordered + unordered]


def test_nav_order_against_reference_sort():
    # Every permutation of a marker set with duplicate and missing orders.
    base = [("a", 2), ("b", 1), ("c", None), ("d", 1), ("e", None)]
    for perm in itertools.permutations(base):
        feats = [
            _point_feature(mid, **({"nav_order": order} if order is not None else {}))
            for mid, order in perm
        ]
        got = [m.marker_id for m in markers_from_features(feats, "l")]
        assert got == _reference_order(perm)


def test_markers_deterministic():
    feats = [_point_feature("m%d" % i, nav_order=(7 * i) % 5) for i in range(10)]
    raw = json.dumps({"type": "FeatureCollection", "features": feats}).encode()
    runs = [
        [m.marker_id for m in markers_from_features(parse_feature_collection(raw), "l")]
        for _ in range(3)
    ]
    assert runs[0] == runs[1] == runs[2]


def test_unknown_properties_preserved():
    feat = _point_feature("x", video_url="https://example.org/clip", custom={"a": 1})
    m = markers_from_features([feat], "l")[0]
    assert m.extras == {"video_url": "https://example.org/clip", "custom": {"a": 1}}


def test_related_locations_parsed():
    feat = _point_feature(
        "x",
        related_locations=[{"label": "Quarry", "position": [-2.44, 41.79]}],
    )
    m = markers_from_features([feat], "l")[0]
    assert m.related_locations[0][0].default == "Quarry"
    assert m.related_locations[0][1] == GeoPoint(-2.44, 41.79)


def test_localized_title():
    feat = _point_feature("x", title={"default": "Chapel", "es": "Capilla"})
    m = markers_from_features([feat], "l")[0]
    assert m.title == LocalizedText("Chapel", (("es", "Capilla"),))


def test_out_of_range_position():
    with pytest.raises(SchemaError, match="lat"):
        markers_from_features([_point_feature("x", lonlat=(0.0, 89.0))], "l")


# --- load_manifest ---------------------------------------------------------------


def test_load_fixture_site(site_dir):
    m = load_manifest(site_dir / "site.json")
    assert len(m.layers) == 3
    assert [l.layer_id for l in m.layers] == ["convent-1835", "camp-1936", "present"]
    camp = m.layers[1]
    assert sum(1 for mk in camp.markers if mk.kind == "model3d") == 16
    assert m.initial_zoom == 16.0
    assert m.pose_for("pano-cloister").heading == 30.0
    # nav-ordered buildings come first.
    assert [mk.marker_id for mk in camp.markers[:3]] == [
        "building-01",
        "building-02",
        "building-03",
    ]


def test_zero_layers_rejected(tmp_path):
    site = make_fixture_site(tmp_path / "s", faults=("no_layers",))
    with pytest.raises(SchemaError, match="layers: at least 1 required"):
        load_manifest(site / "site.json")


def test_dangling_asset_reference(tmp_path):
    site = make_fixture_site(tmp_path / "s", faults=("dangling_media",))
    with pytest.raises(DanglingReferenceError, match="ghost"):
        load_manifest(site / "site.json")


def test_missing_markers_file(tmp_path):
    site = make_fixture_site(tmp_path / "s", faults=("missing_markers_file",))
    with pytest.raises(SchemaError, match="markers_file"):
        load_manifest(site / "site.json")


def test_wrong_schema_version(tmp_path, site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    doc["schema_version"] = 99
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="schema_version"):
        load_manifest(site_dir / "site.json")


def test_unsorted_layers_rejected(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    doc["layers"] = doc["layers"][::-1]
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="period_start ascending"):
        load_manifest(site_dir / "site.json")


def test_overlay_requires_exactly_one_georeference(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    ov = doc["layers"][0]["overlays"][0]
    ov["corners"] = {
        "nw": [-2.48, 41.78],
        "ne": [-2.46, 41.78],
        "se": [-2.46, 41.76],
        "sw": [-2.48, 41.76],
    }
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="exactly one"):
        load_manifest(site_dir / "site.json")


def test_degenerate_corner_quad(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    same = [-2.47, 41.77]
    doc["layers"][0]["overlays"][0] = {
        "asset_id": "map-1835",
        "opacity_default": 0.5,
        "corners": {"nw": same, "ne": same, "se": same, "sw": same},
    }
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="degenerate"):
        load_manifest(site_dir / "site.json")


def test_gcp_pixel_outside_image(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    doc["layers"][0]["overlays"][0]["gcps"][0]["pixel"] = [9999.0, 0.0]
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="outside"):
        load_manifest(site_dir / "site.json")


def test_monochrome_only_for_models(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    photo = next(a for a in doc["assets"] if a["asset_id"] == "photo-archive")
    photo["render_hints"] = {"texture_mode": "monochrome"}
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="monochrome"):
        load_manifest(site_dir / "site.json")


def test_marker_media_kind_mismatch(site_dir):
    camp = json.loads((site_dir / "layers/camp.geojson").read_text())
    feat = next(f for f in camp["features"] if f["id"] == "camp-pano")
    feat["properties"]["media"] = ["bld-main"]  # a GLB on a pano360 marker
    (site_dir / "layers/camp.geojson").write_text(json.dumps(camp))
    with pytest.raises(SchemaError, match="does not allow"):
        load_manifest(site_dir / "site.json")


def test_geo_target_requires_pose(site_dir):
    doc = json.loads((site_dir / "site.json").read_text())
    doc["pano_poses"] = [p for p in doc["pano_poses"] if p["asset_id"] != "pano-cloister"]
    (site_dir / "site.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="requires a pano_pose"):
        load_manifest(site_dir / "site.json")


def test_roundtrip_serialization(site_dir):
    m1 = load_manifest(site_dir / "site.json")
    serialized = manifest_to_dict(m1)
    (site_dir / "site.json").write_text(json.dumps(serialized), encoding="utf-8")
    m2 = load_manifest(site_dir / "site.json")
    assert m1 == m2


def test_collecting_mode_reports_multiple_faults(tmp_path):
    site = make_fixture_site(tmp_path / "s", faults=("dangling_media", "missing_markers_file"))
    col = ErrorCollector(strict=False)
    from heritage_forge.model import load_manifest_collect

    load_manifest_collect(site / "site.json", col)
    codes = [code for _, code, _, _ in col.entries]
    assert len(codes) >= 2
    assert any(c == DanglingReferenceError.code for c in codes)
