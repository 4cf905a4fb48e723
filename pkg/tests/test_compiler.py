"""Bundle compilation: aggregation, determinism, atomicity, closure."""

import json
import os
from pathlib import Path

import pytest

from heritage_forge.compiler import (
    GeorefQualityError,
    compile_site,
    content_hash,
    dumps_index,
    fit_bounds,
)
from heritage_forge.errors import EmptyInputError
from heritage_forge.model import GeoPoint

from conftest import make_fixture_site


# --- content_hash --------------------------------------------------------------


def test_hash_published_vectors():
    # SHA-256("") and SHA-256("abc") are published test vectors.
    assert content_hash(b"") == "e3b0c44298fc1c14"
    assert content_hash(b"abc") == "ba7816bf8f01cfea"


def test_hash_deterministic():
    data = os.urandom(1024)
    assert content_hash(data) == content_hash(data)
    assert len(content_hash(data)) == 16


# --- fit_bounds ------------------------------------------------------------------


def test_fit_bounds_single_point_floor():
    w, s, e, n = fit_bounds([GeoPoint(-2.47, 41.77)], 0.0)
    assert e - w == pytest.approx(1e-4)
    assert n - s == pytest.approx(1e-4)
    assert (w + e) / 2 == pytest.approx(-2.47)
    assert (s + n) / 2 == pytest.approx(41.77)


def test_fit_bounds_exact_span_no_padding():
    w, s, e, n = fit_bounds([GeoPoint(1.0, 10.0), GeoPoint(2.0, 12.0)], 0.0)
    assert (w, s, e, n) == (1.0, 10.0, 2.0, 12.0)


def test_fit_bounds_brute_force_oracle():
    pts = [GeoPoint(-2.47, 41.77), GeoPoint(-2.44, 41.79), GeoPoint(-2.495, 41.755)]
    lons = [p.lon for p in pts]
    lats = [p.lat for p in pts]
    pad = 0.1
    expect_w = min(lons) - pad * (max(lons) - min(lons))
    expect_e = max(lons) + pad * (max(lons) - min(lons))
    expect_s = min(lats) - pad * (max(lats) - min(lats))
    expect_n = max(lats) + pad * (max(lats) - min(lats))
    w, s, e, n = fit_bounds(pts, pad)
    assert (w, s, e, n) == pytest.approx((expect_w, expect_s, expect_e, expect_n))
    assert all(w <= p.lon <= e and s <= p.lat <= n for p in pts)


def test_fit_bounds_empty_rejected():
    with pytest.raises(EmptyInputError):
        fit_bounds([], 0.1)


# --- compile -----------------------------------------------------------------------


def test_compile_fixture_site(site_dir, tmp_path):
    out = tmp_path / "out"
    report, bundle = compile_site(site_dir, out)
    assert report.ok, report.format_text()
    assert bundle is not None and bundle.root == out
    assert report.stats["layers"] == 3
    assert report.stats["markers"]["model3d"] == 16
    assert report.stats["markers"]["pano360"] == 2
    assert report.stats["markers"]["info"] == 3
    assert report.stats["markers"]["video"] == 2
    assert len(report.georef_rmse) == 2
    assert all(r < 1e-3 for r in report.georef_rmse.values())
    assert (out / "site.json").is_file()
    assert (out / "layers/camp-1936.json").is_file()


def test_compile_empty_dir(tmp_path):
    (tmp_path / "empty").mkdir()
    report, bundle = compile_site(tmp_path / "empty", tmp_path / "out")
    assert bundle is None
    assert len(report.errors) == 1
    assert report.errors[0].code == "E001"
    assert "site.json not found" in report.errors[0].message
    assert not (tmp_path / "out").exists()


def test_two_faults_exactly_two_errors(tmp_path):
    site = make_fixture_site(tmp_path / "site", faults=("corrupt_glb", "dangling_media"))
    out = tmp_path / "out"
    report, bundle = compile_site(site, out)
    assert bundle is None
    assert len(report.errors) == 2, report.format_text()
    codes = {e.code for e in report.errors}
    assert "E031" in codes  # bad magic on the corrupted GLB
    assert "E012" in codes  # dangling media reference
    assert not out.exists()  # nothing written on failure


def test_fault_injection_yields_distinct_entries(tmp_path):
    faults = ("corrupt_glb", "dangling_media", "missing_markers_file", "collinear_gcps")
    site = make_fixture_site(tmp_path / "site", faults=faults)
    report, _ = compile_site(site, tmp_path / "out")
    assert len(report.errors) >= len(faults)
    assert len({(e.code, e.path) for e in report.errors}) >= len(faults)


def test_collinear_gcps_reported(tmp_path):
    site = make_fixture_site(tmp_path / "site", faults=("collinear_gcps",))
    report, _ = compile_site(site, tmp_path / "out")
    assert any(e.code == "E051" for e in report.errors), report.format_text()


def test_rmse_gate(tmp_path):
    site = make_fixture_site(tmp_path / "site", faults=("rmse_huge",))
    report, _ = compile_site(site, tmp_path / "out")
    assert any(e.code == GeorefQualityError.code for e in report.errors), report.format_text()


def test_compile_determinism_byte_identical(site_dir, tmp_path):
    _, b1 = compile_site(site_dir, tmp_path / "out1")
    _, b2 = compile_site(site_dir, tmp_path / "out2")
    for rel in ["site.json", "layers/convent-1835.json", "layers/camp-1936.json", "layers/present.json"]:
        f1 = (tmp_path / "out1" / rel).read_bytes()
        f2 = (tmp_path / "out2" / rel).read_bytes()
        assert f1 == f2, rel
    names1 = sorted(p.name for p in (tmp_path / "out1/assets").iterdir())
    names2 = sorted(p.name for p in (tmp_path / "out2/assets").iterdir())
    assert names1 == names2


def test_bundle_closure(bundle_dir):
    """Every assets/ href mentioned in any index exists on disk."""
    refs = set()

    def scan(value):
        if isinstance(value, str) and value.startswith("assets/"):
            refs.add(value)
        elif isinstance(value, dict):
            for v in value.values():
                scan(v)
        elif isinstance(value, list):
            for v in value:
                scan(v)

    scan(json.loads((bundle_dir / "site.json").read_text()))
    for layer_file in (bundle_dir / "layers").iterdir():
        scan(json.loads(layer_file.read_text()))
    assert refs, "indices reference no assets?"
    for ref in refs:
        assert (bundle_dir / ref).is_file(), f"missing {ref}"


def test_asset_names_are_content_hashes(bundle_dir):
    for p in (bundle_dir / "assets").iterdir():
        assert p.stem[:16] == content_hash(p.read_bytes()), p.name


def test_failed_compile_leaves_no_partial_outdir(tmp_path):
    site = make_fixture_site(tmp_path / "site", faults=("corrupt_glb",))
    out = tmp_path / "out"
    compile_site(site, out)
    assert not out.exists()
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".hf-build-")]
    assert leftovers == []


def test_recompile_replaces_existing_bundle(site_dir, tmp_path):
    out = tmp_path / "out"
    compile_site(site_dir, out)
    first = (out / "site.json").read_bytes()
    report, _ = compile_site(site_dir, out)
    assert report.ok
    assert (out / "site.json").read_bytes() == first


def test_refuses_to_replace_non_bundle_dir(site_dir, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / "precious.txt").write_text("user data")
    with pytest.raises(OSError, match="refusing"):
        compile_site(site_dir, out)
    assert (out / "precious.txt").read_text() == "user data"


def test_validate_mode_writes_nothing(site_dir, tmp_path):
    before = {p for p in tmp_path.rglob("*")}
    report, bundle = compile_site(site_dir, write=False)
    assert report.ok
    assert bundle is not None and bundle.root is None
    assert {p for p in tmp_path.rglob("*")} == before


def test_layer_index_contents(bundle_dir):
    camp = json.loads((bundle_dir / "layers/camp-1936.json").read_text())
    assert camp["label"] == "Camp (1936)"
    assert camp["period_start"] == 1936
    kinds = {m["kind"] for m in camp["markers"]}
    assert kinds == {"model3d", "pano360", "info", "video"}
    ov = camp["overlays"][0]
    assert set(ov["corners"]) == {"nw", "ne", "se", "sw"}
    assert ov["rmse_m"] < 1e-3
    assert ov["opacity_default"] == 0.7
    # model3d media carry the dollhouse variant href
    bld = next(m for m in camp["markers"] if m["kind"] == "model3d")
    assert bld["media"][0]["dollhouse_href"].startswith("assets/")
    assert bld["media"][0]["render_hints"]["texture_mode"] == "monochrome"


def test_overlay_corners_order_south_north(bundle_dir):
    conv = json.loads((bundle_dir / "layers/convent-1835.json").read_text())
    c = conv["overlays"][0]["corners"]
    assert c["nw"][1] > c["sw"][1]  # north above south
    assert c["ne"][0] > c["nw"][0]  # east right of west


def test_annotations_resolved_into_layer_index(bundle_dir):
    present = json.loads((bundle_dir / "layers/present.json").read_text())
    pano_marker = next(m for m in present["markers"] if m["kind"] == "pano360")
    media = pano_marker["media"][0]
    assert media["heading"] == 30.0
    anns = media["annotations"]
    assert len(anns) == 2
    explicit = next(a for a in anns if a["label"] == "Small nave")
    assert explicit["yaw"] == 40.0 and explicit["pitch"] == 5.0
    assert explicit["u"] == pytest.approx(0.5 + 40.0 / 360.0, abs=1e-9)
    resolved = next(a for a in anns if a["label"] == "Central nave")
    assert -180.0 < resolved["yaw"] <= 180.0
    assert "u" in resolved and "v" in resolved


def test_zoom_bounds_cover_related_locations(bundle_dir):
    camp = json.loads((bundle_dir / "layers/camp-1936.json").read_text())
    info = next(m for m in camp["markers"] if m["marker_id"] == "workshops")
    w, s, e, n = info["zoom_bounds"]
    pts = [info["position"]] + [r["position"] for r in info["related_locations"]]
    for lon, lat, *_ in pts:
        assert w <= lon <= e and s <= lat <= n


def test_media_previews_exist(bundle_dir):
    site = json.loads((bundle_dir / "site.json").read_text())
    photo = site["assets"]["photo-archive"]
    assert photo["preview"].startswith("assets/")
    assert (bundle_dir / photo["preview"]).is_file()
    assert photo["width"] == 40 and photo["height"] == 30


def test_floats_quantized_to_nine_significant_digits(bundle_dir):
    raw = (bundle_dir / "layers/camp-1936.json").read_text()
    for token in raw.replace(",", " ").replace("]", " ").replace("[", " ").split():
        try:
            float(token)
        except ValueError:
            continue
        if "." in token and "e" not in token and "E" not in token:
            digits = token.replace("-", "").replace(".", "").lstrip("0")
            assert len(digits) <= 9, token


def test_dumps_index_stable_key_order():
    a = dumps_index({"b": 1.0, "a": {"z": 0.1, "y": [1.23456789012345]}})
    b = dumps_index({"a": {"y": [1.23456789012345], "z": 0.1}, "b": 1.0})
    assert a == b
    assert b"1.23456789" in a and b"1.23456789012345" not in a
