"""Compile a site directory into a content-addressed static bundle.

The compiler collects every problem it finds in one pass (authors are
non-programmers iterating on content), and only writes output when the
site is error-free.  Output is deterministic: stable key order, floats
quantized to 9 significant digits, and assets addressed by the first 16
hex characters of their SHA-256.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import assets as assetmod
from . import georef, panogeo
from .errors import AssetError, EmptyInputError, GeorefQualityError, HeritageError
from .model import (
    ErrorCollector,
    GeoPoint,
    Marker,
    MediaAsset,
    SiteManifest,
    TemporalLayer,
    load_manifest_collect,
)

GLB_SIZE_BUDGET = 50 * 1024 * 1024
PANORAMA_MAX_DIM = 8192

# Minimum bbox span in degrees, so single points still get a usable box.
BBOX_FLOOR_DEG = 1e-4
RELATED_ZOOM_PADDING = 0.1


@dataclass(frozen=True)
class ReportEntry:
    severity: str  # "error" | "warning"
    code: str
    path: str
    message: str

    def to_dict(self):
        return {
            "severity": self.severity,
            "code": self.code,
            "path": self.path,
            "message": self.message,
        }


@dataclass
class CompileReport:
    errors: list[ReportEntry] = field(default_factory=list)
    warnings: list[ReportEntry] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    georef_rmse: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": [e.to_dict() for e in self.errors],
            "warnings": [w.to_dict() for w in self.warnings],
            "stats": self.stats,
            "georef_rmse": self.georef_rmse,
        }

    def format_text(self) -> str:
        lines = []
        for e in self.errors:
            lines.append(f"error   {e.code}  {e.path}: {e.message}")
        for w in self.warnings:
            lines.append(f"warning {w.code}  {w.path}: {w.message}")
        lines.append(f"{len(self.errors)} error(s), {len(self.warnings)} warning(s)")
        return "\n".join(lines)


@dataclass
class Bundle:
    root: Path | None
    site_index: dict
    layer_indices: dict[str, dict]
    asset_map: dict[str, str]


def content_hash(data: bytes) -> str:
    """First 16 lowercase hex chars of the SHA-256 of the content."""
    return hashlib.sha256(data).hexdigest()[:16]


def fit_bounds(points, padding_fraction: float = 0.0):
    """Minimal lon/lat bbox over the points: (min_lon, min_lat, max_lon, max_lat).

    Each span is floored at 1e-4 degrees (centered) so single points get
    a non-degenerate box, then padded by padding_fraction of the span on
    each side.  Results are clamped to the coordinate domain.
    """
    points = list(points)
    if not points:
        raise EmptyInputError("fit_bounds requires at least one point")
    if padding_fraction < 0:
        raise ValueError("padding_fraction must be >= 0")
    min_lon = min(p.lon for p in points)
    max_lon = max(p.lon for p in points)
    min_lat = min(p.lat for p in points)
    max_lat = max(p.lat for p in points)
    min_lon, max_lon = _pad_span(min_lon, max_lon, padding_fraction)
    min_lat, max_lat = _pad_span(min_lat, max_lat, padding_fraction)
    return (
        max(min_lon, -180.0),
        max(min_lat, GeoPoint.LAT_MIN),
        min(max_lon, 180.0),
        min(max_lat, GeoPoint.LAT_MAX),
    )


def _pad_span(lo: float, hi: float, padding: float) -> tuple[float, float]:
    span = hi - lo
    if span < BBOX_FLOOR_DEG:
        mid = (lo + hi) / 2.0
        lo, hi = mid - BBOX_FLOOR_DEG / 2.0, mid + BBOX_FLOOR_DEG / 2.0
        span = BBOX_FLOOR_DEG
    return lo - padding * span, hi + padding * span


def _quantize(value):
    """Floats to 9 significant digits, recursively; everything else verbatim."""
    if isinstance(value, float):
        return float(format(value, ".9g"))
    if isinstance(value, dict):
        return {k: _quantize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_quantize(v) for v in value]
    return value


def dumps_index(obj: dict) -> bytes:
    return (
        json.dumps(_quantize(obj), sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    ).encode("utf-8")


class _SiteBuild:
    """Working state for one compile pass."""

    def __init__(self, manifest: SiteManifest, col: ErrorCollector, max_preview: int):
        self.manifest = manifest
        self.col = col
        self.max_preview = max_preview
        self.asset_bytes: dict[str, bytes] = {}
        self.glb_info: dict[str, assetmod.GlbInfo] = {}
        self.image_info: dict[str, assetmod.ImageInfo] = {}
        self.equirect: dict[str, str] = {}
        self.preview_bytes: dict[str, bytes] = {}
        self.asset_map: dict[str, str] = {}
        self.preview_map: dict[str, str] = {}
        self.overlay_corners: dict[tuple[str, str], dict] = {}
        self.overlay_rmse: dict[tuple[str, str], float | None] = {}
        self.annotations: dict[str, list[dict]] = {}

    # -- asset validation -------------------------------------------------

    def validate_assets(self):
        for a in self.manifest.assets:
            path = a.resolve_path(self.manifest.root)
            try:
                data = path.read_bytes()
            except OSError as exc:
                err = AssetError(f"cannot read asset: {exc}")
                self.col.error(err, a.path)
                continue
            self.asset_bytes[a.asset_id] = data
            if a.kind == "glb":
                self._validate_glb(a, data)
            elif a.kind == "image":
                self._validate_image(a, data)
            else:
                self._validate_video(a, data)

    def _validate_glb(self, a: MediaAsset, data: bytes):
        try:
            info = assetmod.validate_glb(data)
        except AssetError as exc:
            self.col.error(exc, a.path)
            return
        self.glb_info[a.asset_id] = info
        if len(data) > GLB_SIZE_BUDGET:
            self.col.warning(
                "W061", a.path, f"GLB is {len(data)} bytes (budget {GLB_SIZE_BUDGET})"
            )
        focus = a.render_hints.get("focus_target")
        if focus is not None and focus not in info.node_names:
            self.col.warning(
                "W063", a.path, f"focus_target {focus!r} not among GLB node names"
            )

    def _validate_image(self, a: MediaAsset, data: bytes):
        try:
            info = assetmod.probe_image(data)
        except AssetError as exc:
            self.col.error(exc, a.path)
            return
        self.image_info[a.asset_id] = info
        if a.role == "panorama":
            status = assetmod.check_equirectangular(info)
            self.equirect[a.asset_id] = status
            if status == "fail":
                self.col.error(
                    AssetError(
                        f"panorama must be 2:1 equirectangular, got {info.width}x{info.height}"
                    ),
                    a.path,
                )
            elif status == "warn":
                self.col.warning(
                    "W040",
                    a.path,
                    f"{info.width}x{info.height} is within 1% of 2:1 but not exact",
                )
            if max(info.width, info.height) > PANORAMA_MAX_DIM:
                self.col.warning(
                    "W062",
                    a.path,
                    f"panorama {info.width}x{info.height} exceeds {PANORAMA_MAX_DIM} px",
                )
        try:
            self.preview_bytes[a.asset_id] = assetmod.derive_preview(data, self.max_preview)
        except AssetError as exc:
            self.col.error(exc, a.path)

    def _validate_video(self, a: MediaAsset, data: bytes):
        ext = Path(a.path).suffix.lower()
        if ext not in assetmod.VIDEO_EXTENSIONS:
            self.col.error(
                AssetError(f"unrecognized video extension {ext!r}"), a.path
            )
        elif not data:
            self.col.error(AssetError("video file is empty"), a.path)

    # -- georeferencing -----------------------------------------------------

    def resolve_overlays(self):
        for layer in self.manifest.layers:
            for ov in layer.overlays:
                key = (layer.layer_id, ov.asset_id)
                where = f"layer {layer.layer_id!r} overlay {ov.asset_id!r}"
                if ov.corners is not None:
                    self.overlay_corners[key] = _corners_dict(ov.corners)
                    self.overlay_rmse[key] = None
                    continue
                info = self.image_info.get(ov.asset_id)
                if info is None:
                    continue  # asset failed validation; already reported
                try:
                    fit = georef.fit_affine(ov.gcps, image_size=(info.width, info.height))
                    corners = georef.overlay_corners(fit.transform, info.width, info.height)
                except HeritageError as exc:
                    self.col.error(exc, where)
                    continue
                self.overlay_corners[key] = _corners_dict(corners)
                self.overlay_rmse[key] = fit.rmse_m
                if fit.rmse_m > georef.RMSE_ERROR_M:
                    self.col.error(
                        GeorefQualityError(
                            f"georeference rmse {fit.rmse_m:.1f} m exceeds "
                            f"{georef.RMSE_ERROR_M:.0f} m; check the GCPs"
                        ),
                        where,
                    )
                elif fit.rmse_m > georef.RMSE_WARN_M:
                    self.col.warning(
                        "W055",
                        where,
                        f"georeference rmse {fit.rmse_m:.1f} m exceeds {georef.RMSE_WARN_M:.0f} m",
                    )

    # -- panorama annotations ---------------------------------------------

    def resolve_annotations(self):
        for i, ann in enumerate(self.manifest.pano_annotations):
            pose = self.manifest.pose_for(ann.pano_asset_id)
            if ann.direction is not None:
                yaw, pitch = ann.direction
            else:
                if pose is None:
                    continue  # dangling pose already reported at load
                try:
                    d = panogeo.annotation_direction(pose, ann.target)
                except HeritageError as exc:
                    self.col.error(exc, f"pano_annotations[{i}]")
                    continue
                yaw, pitch = d.yaw, d.pitch
            uv = panogeo.direction_to_uv(panogeo.Direction(yaw, pitch))
            self.annotations.setdefault(ann.pano_asset_id, []).append(
                {
                    "label": ann.label.to_json(),
                    "body": ann.body.to_json(),
                    "yaw": yaw,
                    "pitch": pitch,
                    "u": uv.u,
                    "v": uv.v,
                }
            )

    # -- output -------------------------------------------------------------

    def address_assets(self):
        for a in self.manifest.assets:
            data = self.asset_bytes.get(a.asset_id)
            if data is None:
                continue
            ext = Path(a.path).suffix.lower()
            self.asset_map[a.asset_id] = f"assets/{content_hash(data)}{ext}"
            preview = self.preview_bytes.get(a.asset_id)
            if preview is not None:
                if preview == data:  # passthrough keeps the original file
                    self.preview_map[a.asset_id] = self.asset_map[a.asset_id]
                else:
                    self.preview_map[a.asset_id] = f"assets/{content_hash(preview)}.png"

    def asset_entry(self, a: MediaAsset) -> dict:
        entry: dict[str, Any] = {
            "href": self.asset_map[a.asset_id],
            "kind": a.kind,
            "role": a.role,
            "bytes": len(self.asset_bytes[a.asset_id]),
        }
        info = self.image_info.get(a.asset_id)
        if info is not None:
            entry["width"] = info.width
            entry["height"] = info.height
        if a.asset_id in self.preview_map:
            entry["preview"] = self.preview_map[a.asset_id]
        if a.asset_id in self.equirect:
            entry["equirectangular"] = self.equirect[a.asset_id]
        if a.caption is not None:
            entry["caption"] = a.caption.to_json()
        if a.render_hints:
            entry["render_hints"] = a.render_hints
        return entry

    def media_entry(self, asset_id: str) -> dict:
        a = self.manifest.asset(asset_id)
        entry = {"asset_id": asset_id}
        entry.update(self.asset_entry(a))
        entry.pop("bytes", None)
        if a.role == "panorama":
            pose = self.manifest.pose_for(asset_id)
            if pose is not None:
                entry["heading"] = pose.heading
            entry["annotations"] = self.annotations.get(asset_id, [])
        variant = a.render_hints.get("dollhouse_variant")
        if variant is not None and variant in self.asset_map:
            entry["dollhouse_href"] = self.asset_map[variant]
        return entry

    def marker_entry(self, m: Marker) -> dict:
        entry: dict[str, Any] = {
            "marker_id": m.marker_id,
            "kind": m.kind,
            "position": _point_json(m.position),
            "title": m.title.to_json(),
            "body": m.body.to_json(),
            "media": [self.media_entry(aid) for aid in m.media if aid in self.asset_map],
            "related_locations": [
                {"label": label.to_json(), "position": _point_json(p)}
                for label, p in m.related_locations
            ],
            "nav_order": m.nav_order,
            "extras": m.extras,
        }
        if m.related_locations:
            entry["zoom_bounds"] = list(
                fit_bounds(
                    [m.position, *(p for _, p in m.related_locations)],
                    RELATED_ZOOM_PADDING,
                )
            )
        else:
            entry["zoom_bounds"] = None
        return entry

    def layer_index(self, layer: TemporalLayer) -> dict:
        overlays = []
        for ov in layer.overlays:
            key = (layer.layer_id, ov.asset_id)
            corners = self.overlay_corners.get(key)
            if corners is None:
                continue
            info = self.image_info.get(ov.asset_id)
            overlays.append(
                {
                    "asset_id": ov.asset_id,
                    "href": self.asset_map[ov.asset_id],
                    "opacity_default": ov.opacity_default,
                    "corners": corners,
                    "rmse_m": self.overlay_rmse[key],
                    "width": info.width,
                    "height": info.height,
                }
            )
        return {
            "layer_id": layer.layer_id,
            "label": layer.label.to_json(),
            "period_start": layer.period_start,
            "period_end": layer.period_end,
            "base_style": layer.base_style,
            "overlays": overlays,
            "markers": [self.marker_entry(m) for m in layer.markers],
        }

    def site_index(self) -> dict:
        m = self.manifest
        return {
            "schema_version": 1,
            "site_id": m.site_id,
            "title": m.title.to_json(),
            "description": m.description.to_json(),
            "initial_view": {
                "position": _point_json(m.initial_position),
                "zoom": m.initial_zoom,
            },
            "layers": [
                {
                    "layer_id": layer.layer_id,
                    "label": layer.label.to_json(),
                    "period_start": layer.period_start,
                    "period_end": layer.period_end,
                    "base_style": layer.base_style,
                    "index": f"layers/{layer.layer_id}.json",
                    "marker_count": len(layer.markers),
                }
                for layer in m.layers
            ],
            "assets": {
                a.asset_id: self.asset_entry(a)
                for a in m.assets
                if a.asset_id in self.asset_map
            },
        }

    def stats(self) -> dict:
        kinds = {k: 0 for k in ("model3d", "pano360", "info", "video")}
        total = 0
        for layer in self.manifest.layers:
            for m in layer.markers:
                kinds[m.kind] += 1
                total += 1
        return {
            "layers": len(self.manifest.layers),
            "markers": {**kinds, "total": total},
            "assets": len(self.manifest.assets),
            "overlays": sum(len(l.overlays) for l in self.manifest.layers),
            "total_asset_bytes": sum(len(b) for b in self.asset_bytes.values())
            + sum(
                len(b)
                for aid, b in self.preview_bytes.items()
                if self.preview_map.get(aid) != self.asset_map.get(aid)
            ),
        }


def _point_json(p: GeoPoint) -> list[float]:
    if p.height != 0.0:
        return [p.lon, p.lat, p.height]
    return [p.lon, p.lat]


def _corners_dict(corners) -> dict:
    nw, ne, se, sw = corners
    return {
        "nw": [nw.lon, nw.lat],
        "ne": [ne.lon, ne.lat],
        "se": [se.lon, se.lat],
        "sw": [sw.lon, sw.lat],
    }


def compile_site(
    site_dir,
    out_dir=None,
    max_preview: int = assetmod.DEFAULT_PREVIEW_MAX_DIM,
    write: bool = True,
) -> tuple[CompileReport, Bundle | None]:
    """Validate a site directory and, on success, write the bundle.

    With write=False (the CLI's ``validate``) the full pipeline runs and
    reports, but nothing touches the filesystem.  A failed compile never
    leaves a partial out_dir: output lands in a temp directory that is
    renamed into place only when complete.
    """
    site_dir = Path(site_dir)
    report = CompileReport()
    manifest_path = site_dir / "site.json"
    if not manifest_path.is_file():
        report.errors.append(
            ReportEntry("error", "E001", "site.json", "site.json not found")
        )
        return report, None

    col = ErrorCollector(strict=False)
    manifest = load_manifest_collect(manifest_path, col)
    build = None
    if manifest is not None:
        build = _SiteBuild(manifest, col, max_preview)
        build.validate_assets()
        build.resolve_overlays()
        build.resolve_annotations()
        build.address_assets()

    for severity, code, where, message in col.entries:
        entry = ReportEntry(severity, code, where, message)
        (report.errors if severity == "error" else report.warnings).append(entry)
    if build is not None:
        report.stats = build.stats()
        report.georef_rmse = {
            f"{lid}/{aid}": rmse
            for (lid, aid), rmse in sorted(build.overlay_rmse.items())
            if rmse is not None
        }
    if not report.ok or build is None:
        return report, None

    site_index = build.site_index()
    layer_indices = {l.layer_id: build.layer_index(l) for l in manifest.layers}
    bundle = Bundle(None, site_index, layer_indices, dict(build.asset_map))
    if not write:
        return report, bundle

    files: dict[str, bytes] = {"site.json": dumps_index(site_index)}
    for lid, idx in layer_indices.items():
        files[f"layers/{lid}.json"] = dumps_index(idx)
    for a in manifest.assets:
        files[build.asset_map[a.asset_id]] = build.asset_bytes[a.asset_id]
    for aid, href in build.preview_map.items():
        files[href] = build.preview_bytes[aid]

    out_dir = Path(out_dir)
    _write_atomically(out_dir, files)
    bundle.root = out_dir
    return report, bundle


def _looks_replaceable(path: Path) -> bool:
    if not path.is_dir():
        return False
    entries = list(path.iterdir())
    return not entries or (path / "site.json").is_file()


def _write_atomically(out_dir: Path, files: dict[str, bytes]):
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".hf-build-", dir=out_dir.parent))
    try:
        for rel, data in files.items():
            target = tmp / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
        if out_dir.exists():
            if not _looks_replaceable(out_dir):
                raise OSError(
                    f"refusing to replace {out_dir}: not an empty directory or a bundle"
                )
            shutil.rmtree(out_dir)
        os.rename(tmp, out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
