"""Shared fixtures: crafted binary assets and a complete fixture site.

The fixture site mirrors the real-world shape this tool targets: three
temporal layers (convent / camp / present), two GCP-georeferenced map
overlays, sixteen reconstructed-building markers in the camp layer, and
at least one marker of every kind.  Faults can be injected by name for
report-aggregation tests.
"""

from __future__ import annotations

import io
import json
import struct
import threading
from pathlib import Path

import pytest
from PIL import Image

from heritage_forge.georef import lonlat_to_webmercator, webmercator_to_lonlat, PlanePoint
from heritage_forge.model import GeoPoint

# --- binary asset builders -------------------------------------------------


def build_glb(
    doc=None,
    bin_chunk: bytes | None = None,
    *,
    magic: bytes = b"glTF",
    version: int = 2,
    declared: int | None = None,
) -> bytes:
    """Assemble a GLB: header + padded JSON chunk (+ optional BIN chunk)."""
    payload = json.dumps(doc if doc is not None else {"asset": {"version": "2.0"}}).encode()
    payload += b" " * ((4 - len(payload) % 4) % 4)
    body = struct.pack("<I4s", len(payload), b"JSON") + payload
    if bin_chunk is not None:
        bin_chunk = bin_chunk + b"\x00" * ((4 - len(bin_chunk) % 4) % 4)
        body += struct.pack("<I4s", len(bin_chunk), b"BIN\x00") + bin_chunk
    total = 12 + len(body)
    header = magic + struct.pack("<II", version, declared if declared is not None else total)
    return header + body


def build_png(width: int, height: int, color=(120, 110, 100)) -> bytes:
    img = Image.new("RGB", (width, height), color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def build_jpeg(width: int, height: int, color=(90, 120, 150), progressive=False) -> bytes:
    img = Image.new("RGB", (width, height), color)
    buf = io.BytesIO()
    img.save(buf, format="JPEG", quality=85, progressive=progressive)
    return buf.getvalue()


FAKE_MP4 = b"\x00\x00\x00\x20ftypisom\x00\x00\x02\x00isomiso2" + b"\x00" * 4096


# --- fixture site ------------------------------------------------------------

SITE_CENTER = (-2.47, 41.77)  # Soria, Spain


def _gcps_for(bounds, width: int, height: int, jitter=None):
    """GCPs consistent with an axis-aligned pixel->plane mapping of the image."""
    lon_w, lat_s, lon_e, lat_n = bounds
    nw = lonlat_to_webmercator(GeoPoint(lon_w, lat_n))
    ne = lonlat_to_webmercator(GeoPoint(lon_e, lat_n))
    sw = lonlat_to_webmercator(GeoPoint(lon_w, lat_s))
    ax = (ne.x - nw.x) / width
    ey = (sw.y - nw.y) / height
    pixels = [
        (0.0, 0.0),
        (width, 0.0),
        (width, height),
        (0.0, height),
        (width / 2.0, height / 2.0),
    ]
    gcps = []
    for i, (px, py) in enumerate(pixels):
        x = nw.x + ax * px
        y = nw.y + ey * py
        if jitter:
            x += jitter[i % len(jitter)][0]
            y += jitter[i % len(jitter)][1]
        g = webmercator_to_lonlat(PlanePoint(x, y))
        gcps.append({"pixel": [px, py], "geo": [g.lon, g.lat]})
    return gcps


def _feature(marker_id, kind, lonlat, title, **props):
    properties = {"kind": kind, "title": title, **props}
    return {
        "type": "Feature",
        "id": marker_id,
        "geometry": {"type": "Point", "coordinates": list(lonlat)},
        "properties": properties,
    }


def make_fixture_site(root: Path, faults: tuple[str, ...] = ()) -> Path:
    """Write a complete, valid site into root (unless faults are injected)."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "assets").mkdir(exist_ok=True)
    (root / "layers").mkdir(exist_ok=True)
    lon0, lat0 = SITE_CENTER

    # Binary assets.
    glb_doc = {
        "asset": {"version": "2.0"},
        "nodes": [{"name": "Nave"}, {"name": "Courtyard"}],
    }
    building_glb = build_glb(glb_doc, b"\x01\x02\x03\x04")
    dollhouse_glb = build_glb({"asset": {"version": "2.0"}, "nodes": [{"name": "Interior"}]})
    (root / "assets/building.glb").write_bytes(building_glb)
    (root / "assets/dollhouse.glb").write_bytes(dollhouse_glb)
    (root / "assets/pano-cloister.png").write_bytes(build_png(64, 32, (140, 150, 160)))
    (root / "assets/pano-garden.png").write_bytes(build_png(128, 64, (90, 140, 90)))
    (root / "assets/photo-archive.png").write_bytes(build_png(40, 30, (80, 80, 90)))
    (root / "assets/map-1835.png").write_bytes(build_png(400, 300, (210, 200, 180)))
    (root / "assets/plan-1936.png").write_bytes(build_png(360, 240, (190, 190, 200)))
    (root / "assets/interview.mp4").write_bytes(FAKE_MP4)

    if "corrupt_glb" in faults:
        (root / "assets/building.glb").write_bytes(b"GLTF" + building_glb[4:])

    assets = [
        {
            "asset_id": "bld-main",
            "path": "assets/building.glb",
            "kind": "glb",
            "role": "model",
            "render_hints": {
                "texture_mode": "monochrome",
                "dollhouse_variant": "bld-dollhouse",
                "focus_target": "Nave",
            },
        },
        {
            "asset_id": "bld-dollhouse",
            "path": "assets/dollhouse.glb",
            "kind": "glb",
            "role": "model",
        },
        {
            "asset_id": "pano-cloister",
            "path": "assets/pano-cloister.png",
            "kind": "image",
            "role": "panorama",
            "caption": "Cloister, present day",
        },
        {
            "asset_id": "pano-garden",
            "path": "assets/pano-garden.png",
            "kind": "image",
            "role": "panorama",
        },
        {
            "asset_id": "photo-archive",
            "path": "assets/photo-archive.png",
            "kind": "image",
            "role": "photo",
            "caption": {"default": "Archive photograph", "es": "Fotografía de archivo"},
        },
        {
            "asset_id": "map-1835",
            "path": "assets/map-1835.png",
            "kind": "image",
            "role": "overlay",
        },
        {
            "asset_id": "plan-1936",
            "path": "assets/plan-1936.png",
            "kind": "image",
            "role": "overlay",
        },
        {
            "asset_id": "interview",
            "path": "assets/interview.mp4",
            "kind": "video",
            "role": "clip",
        },
    ]

    # Camp layer: sixteen reconstructed buildings plus one of each other kind.
    camp_features = []
    for i in range(16):
        props = {"media": ["bld-main"], "body": f"Reconstructed building {i + 1}."}
        if i < 3:
            props["nav_order"] = i + 1
        camp_features.append(
            _feature(
                f"building-{i + 1:02d}",
                "model3d",
                (lon0 + 0.0002 * (i % 4), lat0 + 0.00015 * (i // 4)),
                f"Building {i + 1}",
                **props,
            )
        )
    camp_features.append(
        _feature(
            "camp-pano",
            "pano360",
            (lon0 + 0.001, lat0 + 0.0002),
            "Camp grounds panorama",
            media=["pano-garden"],
        )
    )
    camp_features.append(
        _feature(
            "workshops",
            "info",
            (lon0 + 0.0005, lat0 - 0.0003),
            "Workshop locations",
            media=["photo-archive"],
            body="Prisoners worked at two sites outside the walls.",
            related_locations=[
                {"label": "North quarry", "position": [lon0 + 0.03, lat0 + 0.02]},
                {"label": "Rail depot", "position": [lon0 - 0.025, lat0 - 0.015]},
            ],
        )
    )
    dangling = ["ghost"] if "dangling_media" in faults else ["interview"]
    camp_features.append(
        _feature(
            "camp-interview",
            "video",
            (lon0 - 0.0004, lat0 + 0.0004),
            "Interview at the gate",
            media=dangling,
        )
    )

    convent_features = [
        _feature(
            "founding",
            "info",
            (lon0, lat0),
            "Founding of the convent",
            body="Built in the early modern period.",
        ),
        _feature(
            "chapel-story",
            "video",
            (lon0 + 0.0003, lat0 + 0.0001),
            "The chapel",
            media=["interview"],
        ),
    ]

    present_features = [
        _feature(
            "cloister-view",
            "pano360",
            (lon0 + 0.0001, lat0 - 0.0001),
            "Cloister today",
            media=["pano-cloister"],
        ),
        _feature(
            "visiting",
            "info",
            (lon0 - 0.0002, lat0 - 0.0002),
            "Visiting the park",
        ),
    ]

    layer_files = {
        "layers/convent.geojson": convent_features,
        "layers/camp.geojson": camp_features,
        "layers/present.geojson": present_features,
    }
    for rel, feats in layer_files.items():
        (root / rel).write_text(
            json.dumps({"type": "FeatureCollection", "features": feats}, indent=1),
            encoding="utf-8",
        )

    convent_gcps = _gcps_for((lon0 - 0.0025, lat0 - 0.002, lon0 + 0.0025, lat0 + 0.002), 400, 300)
    camp_gcps = _gcps_for((lon0 - 0.002, lat0 - 0.0015, lon0 + 0.002, lat0 + 0.0015), 360, 240)
    if "collinear_gcps" in faults:
        camp_gcps = [
            {"pixel": [i * 10.0, i * 10.0], "geo": g["geo"]}
            for i, g in enumerate(camp_gcps[:3])
        ]
    if "rmse_huge" in faults:
        camp_gcps[0]["geo"][0] += 0.01  # ~800 ground meters; fit must flag it

    manifest = {
        "schema_version": 1,
        "site_id": "riverbend-heritage",
        "title": "Riverbend Convent and Camp",
        "description": {
            "default": "Three phases of one site: convent, internment camp, park.",
            "es": "Tres fases de un mismo lugar.",
        },
        "initial_view": {"position": [lon0, lat0], "zoom": 16},
        "layers": [
            {
                "layer_id": "convent-1835",
                "label": "Convent (1835)",
                "period_start": 1835,
                "period_end": 1935,
                "base_style": "plain",
                "markers_file": "layers/convent.geojson",
                "overlays": [
                    {"asset_id": "map-1835", "opacity_default": 0.85, "gcps": convent_gcps}
                ],
            },
            {
                "layer_id": "camp-1936",
                "label": "Camp (1936)",
                "period_start": 1936,
                "period_end": 1945,
                "base_style": "satellite",
                "markers_file": "layers/camp.geojson",
                "overlays": [
                    {"asset_id": "plan-1936", "opacity_default": 0.7, "gcps": camp_gcps}
                ],
            },
            {
                "layer_id": "present",
                "label": "Present day",
                "period_start": 2020,
                "base_style": "satellite",
                "markers_file": "layers/present.geojson",
            },
        ],
        "assets": assets,
        "pano_poses": [
            {
                "asset_id": "pano-cloister",
                "position": [lon0 + 0.0001, lat0 - 0.0001],
                "heading": 30.0,
            },
            {
                "asset_id": "pano-garden",
                "position": [lon0 + 0.001, lat0 + 0.0002],
                "heading": 210.0,
                "camera_height": 1.5,
            },
        ],
        "pano_annotations": [
            {
                "pano_asset_id": "pano-cloister",
                "label": "Small nave",
                "body": "Still standing today.",
                "direction": {"yaw": 40.0, "pitch": 5.0},
            },
            {
                "pano_asset_id": "pano-cloister",
                "label": "Central nave",
                "body": "Demolished in the 1970s.",
                "target": [lon0 + 0.0006, lat0 + 0.0002, 9.0],
            },
        ],
    }
    if "no_layers" in faults:
        manifest["layers"] = []
    if "missing_markers_file" in faults:
        (root / "layers/present.geojson").unlink()
    (root / "site.json").write_text(json.dumps(manifest, indent=1), encoding="utf-8")
    return root


@pytest.fixture
def site_dir(tmp_path) -> Path:
    return make_fixture_site(tmp_path / "site")


@pytest.fixture
def bundle_dir(tmp_path, site_dir) -> Path:
    from heritage_forge.compiler import compile_site

    out = tmp_path / "bundle"
    report, bundle = compile_site(site_dir, out)
    assert report.ok, report.format_text()
    return bundle.root


@pytest.fixture
def live_server(bundle_dir):
    """A running bundle server on an ephemeral port; yields the base URL."""
    from heritage_forge.server import ServerConfig, make_server

    server = make_server(ServerConfig(bundle_dir=bundle_dir, bind_address="127.0.0.1", port=0))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    try:
        yield f"http://{host}:{port}"
    finally:
        server.shutdown()
        server.server_close()
