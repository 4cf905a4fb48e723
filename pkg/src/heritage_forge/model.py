"""Domain model and manifest ingestion.

A site is described by one ``site.json`` manifest (schema_version 1)
plus one RFC 7946 GeoJSON FeatureCollection of Point markers per
temporal layer.  Coordinate order is lon,lat everywhere.  Loading is
read-only and validates every invariant; unknown marker properties are
preserved in ``Marker.extras`` for forward compatibility.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import (
    DanglingReferenceError,
    DomainError,
    DuplicateIdError,
    GeoJsonError,
    HeritageError,
    ManifestSyntaxError,
    SchemaError,
)

SCHEMA_VERSION = 1

MARKER_KINDS = ("model3d", "pano360", "info", "video")
ASSET_KINDS = ("glb", "image", "video")
ASSET_ROLES = ("overlay", "panorama", "photo", "model", "clip")
BASE_STYLES = ("satellite", "plain")

# Media formats allowed per marker kind (declared asset kinds).
KIND_MEDIA = {
    "model3d": ("glb",),
    "pano360": ("image",),
    "info": ("image",),
    "video": ("video",),
}

_SLUG_RE = re.compile(r"^[a-z0-9][a-z0-9_-]{0,63}$")

DEFAULT_CAMERA_HEIGHT_M = 1.6


@dataclass(frozen=True)
class GeoPoint:
    """WGS84 position; height is meters above local ground."""

    LAT_MIN = -85.051129  # Web Mercator display domain
    LAT_MAX = 85.051129

    lon: float
    lat: float
    height: float = 0.0

    def __post_init__(self):
        if not (-180.0 <= self.lon <= 180.0):
            raise DomainError(f"lon {self.lon} outside [-180, 180]")
        if not (self.LAT_MIN <= self.lat <= self.LAT_MAX):
            raise DomainError(f"lat {self.lat} outside [{self.LAT_MIN}, {self.LAT_MAX}]")


@dataclass(frozen=True)
class LocalizedText:
    """Text with a default language plus optional per-locale variants."""

    default: str
    translations: tuple[tuple[str, str], ...] = ()

    @classmethod
    def parse(cls, value) -> "LocalizedText":
        if isinstance(value, str):
            return cls(value)
        if isinstance(value, dict):
            default = value.get("default")
            if not isinstance(default, str):
                raise SchemaError("default", "localized text needs a 'default' string")
            extra = []
            for k in sorted(value):
                if k == "default":
                    continue
                if not isinstance(value[k], str):
                    raise SchemaError(k, "locale variant must be a string")
                extra.append((k, value[k]))
            return cls(default, tuple(extra))
        raise SchemaError("", f"expected string or locale map, got {type(value).__name__}")

    def to_json(self):
        if not self.translations:
            return self.default
        out = {"default": self.default}
        out.update(self.translations)
        return out


@dataclass(frozen=True)
class GroundControlPoint:
    """Pixel (x right, y down) to geographic correspondence."""

    pixel: tuple[float, float]
    geo: GeoPoint


@dataclass(frozen=True)
class OverlayRef:
    """A raster map placed on the basemap, by corners or by GCPs."""

    asset_id: str
    opacity_default: float
    corners: tuple[GeoPoint, GeoPoint, GeoPoint, GeoPoint] | None = None  # NW NE SE SW
    gcps: tuple[GroundControlPoint, ...] | None = None


@dataclass(frozen=True)
class Marker:
    marker_id: str
    layer_id: str
    kind: str
    position: GeoPoint
    title: LocalizedText
    body: LocalizedText = LocalizedText("")
    media: tuple[str, ...] = ()
    related_locations: tuple[tuple[LocalizedText, GeoPoint], ...] = ()
    nav_order: int | None = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MediaAsset:
    asset_id: str
    path: str  # as authored, relative to the site root
    kind: str
    role: str
    caption: LocalizedText | None = None
    render_hints: dict = field(default_factory=dict)

    def resolve_path(self, root: Path) -> Path:
        return (root / self.path).resolve() if not Path(self.path).is_absolute() else Path(self.path)


@dataclass(frozen=True)
class PanoPose:
    """Camera pose of a panorama; heading is stored normalized to [0, 360)."""

    position: GeoPoint
    heading: float
    camera_height: float = DEFAULT_CAMERA_HEIGHT_M

    def __post_init__(self):
        h = math.fmod(self.heading, 360.0)
        if h < 0.0:
            h += 360.0
        object.__setattr__(self, "heading", h)


@dataclass(frozen=True)
class PanoAnnotation:
    pano_asset_id: str
    label: LocalizedText
    body: LocalizedText = LocalizedText("")
    # Exactly one of the two is set.
    direction: tuple[float, float] | None = None  # (yaw, pitch) degrees
    target: GeoPoint | None = None


@dataclass(frozen=True)
class TemporalLayer:
    layer_id: str
    label: LocalizedText
    period_start: int
    period_end: int | None
    base_style: str
    markers_file: str  # as authored, relative to the site root
    overlays: tuple[OverlayRef, ...] = ()
    markers: tuple[Marker, ...] = ()


@dataclass(frozen=True)
class SiteManifest:
    site_id: str
    title: LocalizedText
    description: LocalizedText
    initial_position: GeoPoint
    initial_zoom: float
    layers: tuple[TemporalLayer, ...]
    assets: tuple[MediaAsset, ...]
    pano_poses: tuple[tuple[str, PanoPose], ...] = ()  # (asset_id, pose)
    pano_annotations: tuple[PanoAnnotation, ...] = ()
    root: Path = Path(".")

    def asset(self, asset_id: str) -> MediaAsset | None:
        for a in self.assets:
            if a.asset_id == asset_id:
                return a
        return None

    def pose_for(self, asset_id: str) -> PanoPose | None:
        for aid, pose in self.pano_poses:
            if aid == asset_id:
                return pose
        return None


class ErrorCollector:
    """Accumulates report entries; in strict mode the first error raises."""

    def __init__(self, strict: bool = True):
        self.strict = strict
        self.entries: list[tuple[str, str, str, str]] = []

    def error(self, exc: HeritageError, where: str = ""):
        if self.strict:
            raise exc
        self.entries.append(("error", exc.code, where, str(exc)))

    def warning(self, code: str, where: str, message: str):
        self.entries.append(("warning", code, where, message))


# --- low-level value parsing ---------------------------------------------


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _parse_slug(value, where: str, col: ErrorCollector) -> str | None:
    if value is None:  # missing field already reported by _req
        return None
    if not isinstance(value, str) or not _SLUG_RE.match(value):
        col.error(SchemaError(where, f"expected slug ([a-z0-9_-], got {value!r})"))
        return None
    return value


def _parse_text(value, where: str, col: ErrorCollector) -> LocalizedText | None:
    if value is None:
        return None
    try:
        return LocalizedText.parse(value)
    except SchemaError as exc:
        col.error(SchemaError(where, str(exc)))
        return None


def _parse_geopoint(value, where: str, col: ErrorCollector) -> GeoPoint | None:
    if (
        not isinstance(value, list)
        or len(value) not in (2, 3)
        or not all(_is_number(v) for v in value)
    ):
        col.error(SchemaError(where, "expected [lon, lat] or [lon, lat, height]"))
        return None
    try:
        return GeoPoint(float(value[0]), float(value[1]), float(value[2]) if len(value) == 3 else 0.0)
    except DomainError as exc:
        col.error(SchemaError(where, str(exc)))
        return None


def _req(obj: dict, key: str, where: str, col: ErrorCollector):
    if key not in obj:
        col.error(SchemaError(f"{where}.{key}" if where else key, "required field missing"))
        return None
    return obj[key]


# --- GeoJSON marker files --------------------------------------------------


def parse_feature_collection(data: bytes) -> list[dict]:
    """Parse an RFC 7946 FeatureCollection of Point features.

    Returns the raw feature dicts (geometry + properties), coordinates
    kept in lon,lat order.  Non-Point geometries are rejected: markers
    are points.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ManifestSyntaxError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSyntaxError(exc.msg, exc.lineno, exc.colno) from None

    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoJsonError("root object must have type FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise GeoJsonError("FeatureCollection needs a 'features' array")
    for i, feat in enumerate(features):
        if not isinstance(feat, dict) or feat.get("type") != "Feature":
            raise GeoJsonError(f"features[{i}] is not a Feature")
        geom = feat.get("geometry")
        if not isinstance(geom, dict):
            raise GeoJsonError(f"features[{i}] has no geometry")
        if geom.get("type") != "Point":
            raise GeoJsonError(f"features[{i}]: markers must be Point, got {geom.get('type')}")
        coords = geom.get("coordinates")
        if (
            not isinstance(coords, list)
            or len(coords) not in (2, 3)
            or not all(_is_number(c) for c in coords)
        ):
            raise GeoJsonError(f"features[{i}]: missing or malformed coordinates")
        props = feat.get("properties")
        if props is not None and not isinstance(props, dict):
            raise GeoJsonError(f"features[{i}]: properties must be an object")
    return features


_MARKER_PROP_KEYS = frozenset(
    {"marker_id", "kind", "title", "body", "media", "related_locations", "nav_order"}
)


def markers_from_features(
    features: list[dict], layer_id: str, col: ErrorCollector | None = None
) -> list[Marker]:
    """Map raw Point features to Markers.

    Output order: nav_order ascending with marker_id as tiebreak, then
    markers without nav_order in file order.  Unknown properties land in
    Marker.extras untouched.
    """
    col = col if col is not None else ErrorCollector(strict=True)
    markers: list[Marker] = []
    seen: set[str] = set()
    for i, feat in enumerate(features):
        where = f"features[{i}]"
        props = feat.get("properties") or {}

        marker_id = props.get("marker_id", feat.get("id"))
        if marker_id is None:
            col.error(SchemaError(f"{where}.marker_id", "required field missing"))
            continue
        marker_id = _parse_slug(marker_id, f"{where}.marker_id", col)
        if marker_id is None:
            continue
        if marker_id in seen:
            col.error(DuplicateIdError(marker_id, f"layer {layer_id!r} markers"))
            continue
        seen.add(marker_id)

        kind = props.get("kind")
        if kind not in MARKER_KINDS:
            col.error(
                SchemaError(f"{where}.kind", f"unknown kind {kind!r}, expected one of {MARKER_KINDS}")
            )
            continue
        if "title" not in props:
            col.error(SchemaError(f"{where}.title", "required field missing"))
            continue
        title = _parse_text(props["title"], f"{where}.title", col)
        if title is None:
            continue
        body = _parse_text(props.get("body", ""), f"{where}.body", col) or LocalizedText("")

        coords = feat["geometry"]["coordinates"]
        position = _parse_geopoint(coords, f"{where}.geometry.coordinates", col)
        if position is None:
            continue

        media_raw = props.get("media", [])
        if not isinstance(media_raw, list) or not all(isinstance(m, str) for m in media_raw):
            col.error(SchemaError(f"{where}.media", "expected a list of asset ids"))
            continue
        if kind != "info" and not media_raw:
            col.error(SchemaError(f"{where}.media", f"kind {kind!r} requires at least one asset"))
            continue

        related: list[tuple[LocalizedText, GeoPoint]] = []
        rel_raw = props.get("related_locations", [])
        if not isinstance(rel_raw, list):
            col.error(SchemaError(f"{where}.related_locations", "expected a list"))
            continue
        rel_ok = True
        for j, rl in enumerate(rel_raw):
            rwhere = f"{where}.related_locations[{j}]"
            if not isinstance(rl, dict) or "label" not in rl or "position" not in rl:
                col.error(SchemaError(rwhere, "expected {label, position}"))
                rel_ok = False
                break
            label = _parse_text(rl["label"], f"{rwhere}.label", col)
            pos = _parse_geopoint(rl["position"], f"{rwhere}.position", col)
            if label is None or pos is None:
                rel_ok = False
                break
            related.append((label, pos))
        if not rel_ok:
            continue

        nav_order = props.get("nav_order")
        if nav_order is not None and (not isinstance(nav_order, int) or isinstance(nav_order, bool)):
            col.error(SchemaError(f"{where}.nav_order", "expected an integer"))
            continue

        extras = {k: v for k, v in props.items() if k not in _MARKER_PROP_KEYS}
        markers.append(
            Marker(
                marker_id=marker_id,
                layer_id=layer_id,
                kind=kind,
                position=position,
                title=title,
                body=body,
                media=tuple(media_raw),
                related_locations=tuple(related),
                nav_order=nav_order,
                extras=extras,
            )
        )

    ordered = [m for m in markers if m.nav_order is not None]
    unordered = [m for m in markers if m.nav_order is None]
    ordered.sort(key=lambda m: (m.nav_order, m.marker_id))
    return ordered + unordered


# --- manifest ----------------------------------------------------------------


def _parse_overlay(obj, where: str, col: ErrorCollector) -> OverlayRef | None:
    if not isinstance(obj, dict):
        col.error(SchemaError(where, "expected an object"))
        return None
    asset_id = _parse_slug(_req(obj, "asset_id", where, col), f"{where}.asset_id", col)
    if asset_id is None:
        return None
    opacity = obj.get("opacity_default", 1.0)
    if not _is_number(opacity) or not (0.0 <= opacity <= 1.0):
        col.error(SchemaError(f"{where}.opacity_default", "expected a number in [0, 1]"))
        return None

    has_corners = "corners" in obj
    has_gcps = "gcps" in obj
    if has_corners == has_gcps:
        col.error(
            SchemaError(where, "exactly one of 'corners' or 'gcps' must be present")
        )
        return None

    if has_corners:
        c = obj["corners"]
        if not isinstance(c, dict) or set(c) != {"nw", "ne", "se", "sw"}:
            col.error(SchemaError(f"{where}.corners", "expected keys nw, ne, se, sw"))
            return None
        pts = []
        for key in ("nw", "ne", "se", "sw"):
            p = _parse_geopoint(c[key], f"{where}.corners.{key}", col)
            if p is None:
                return None
            pts.append(p)
        # Degenerate quads (zero shoelace area in degrees) are authoring errors.
        area = 0.0
        for k in range(4):
            p, q = pts[k], pts[(k + 1) % 4]
            area += p.lon * q.lat - q.lon * p.lat
        if abs(area) < 1e-12:
            col.error(SchemaError(f"{where}.corners", "corner quadrilateral is degenerate"))
            return None
        return OverlayRef(asset_id, float(opacity), corners=tuple(pts))

    g = obj["gcps"]
    if not isinstance(g, list) or len(g) < 3:
        col.error(SchemaError(f"{where}.gcps", "expected a list of at least 3 GCPs"))
        return None
    gcps = []
    for j, item in enumerate(g):
        gwhere = f"{where}.gcps[{j}]"
        if not isinstance(item, dict) or "pixel" not in item or "geo" not in item:
            col.error(SchemaError(gwhere, "expected {pixel, geo}"))
            return None
        pix = item["pixel"]
        if not isinstance(pix, list) or len(pix) != 2 or not all(_is_number(v) for v in pix):
            col.error(SchemaError(f"{gwhere}.pixel", "expected [x, y] pixels"))
            return None
        geo = _parse_geopoint(item["geo"], f"{gwhere}.geo", col)
        if geo is None:
            return None
        gcps.append(GroundControlPoint((float(pix[0]), float(pix[1])), geo))
    return OverlayRef(asset_id, float(opacity), gcps=tuple(gcps))


def _parse_asset(obj, where: str, col: ErrorCollector) -> MediaAsset | None:
    if not isinstance(obj, dict):
        col.error(SchemaError(where, "expected an object"))
        return None
    asset_id = _parse_slug(_req(obj, "asset_id", where, col), f"{where}.asset_id", col)
    path = _req(obj, "path", where, col)
    kind = _req(obj, "kind", where, col)
    role = _req(obj, "role", where, col)
    if asset_id is None or path is None or kind is None or role is None:
        return None
    if not isinstance(path, str) or not path:
        col.error(SchemaError(f"{where}.path", "expected a non-empty path string"))
        return None
    if kind not in ASSET_KINDS:
        col.error(SchemaError(f"{where}.kind", f"expected one of {ASSET_KINDS}"))
        return None
    if role not in ASSET_ROLES:
        col.error(SchemaError(f"{where}.role", f"expected one of {ASSET_ROLES}"))
        return None
    caption = None
    if "caption" in obj:
        caption = _parse_text(obj["caption"], f"{where}.caption", col)
        if caption is None:
            return None
    hints = obj.get("render_hints", {})
    if not isinstance(hints, dict):
        col.error(SchemaError(f"{where}.render_hints", "expected an object"))
        return None
    if hints.get("texture_mode") not in (None, "photographic", "monochrome"):
        col.error(
            SchemaError(f"{where}.render_hints.texture_mode", "expected photographic or monochrome")
        )
        return None
    if hints.get("texture_mode") == "monochrome" and role != "model":
        col.error(
            SchemaError(
                f"{where}.render_hints.texture_mode",
                "monochrome is only permitted for model-role assets",
            )
        )
        return None
    return MediaAsset(asset_id, path, kind, role, caption, dict(hints))


def _parse_layer(obj, where: str, col: ErrorCollector) -> TemporalLayer | None:
    if not isinstance(obj, dict):
        col.error(SchemaError(where, "expected an object"))
        return None
    layer_id = _parse_slug(_req(obj, "layer_id", where, col), f"{where}.layer_id", col)
    label_raw = _req(obj, "label", where, col)
    start = _req(obj, "period_start", where, col)
    markers_file = _req(obj, "markers_file", where, col)
    if layer_id is None or label_raw is None or start is None or markers_file is None:
        return None
    label = _parse_text(label_raw, f"{where}.label", col)
    if label is None:
        return None
    if not isinstance(start, int) or isinstance(start, bool):
        col.error(SchemaError(f"{where}.period_start", "expected an integer year"))
        return None
    end = obj.get("period_end")
    if end is not None and (not isinstance(end, int) or isinstance(end, bool)):
        col.error(SchemaError(f"{where}.period_end", "expected an integer year"))
        return None
    if end is not None and start > end:
        col.error(SchemaError(f"{where}.period_end", f"period_end {end} before period_start {start}"))
        return None
    style = obj.get("base_style", "satellite")
    if style not in BASE_STYLES:
        col.error(SchemaError(f"{where}.base_style", f"expected one of {BASE_STYLES}"))
        return None
    if not isinstance(markers_file, str) or not markers_file:
        col.error(SchemaError(f"{where}.markers_file", "expected a non-empty path string"))
        return None
    overlays = []
    for j, ov in enumerate(obj.get("overlays", [])):
        parsed = _parse_overlay(ov, f"{where}.overlays[{j}]", col)
        if parsed is not None:
            overlays.append(parsed)
    return TemporalLayer(
        layer_id=layer_id,
        label=label,
        period_start=start,
        period_end=end,
        base_style=style,
        markers_file=markers_file,
        overlays=tuple(overlays),
    )


def _parse_pose(obj, where: str, col: ErrorCollector) -> tuple[str, PanoPose] | None:
    if not isinstance(obj, dict):
        col.error(SchemaError(where, "expected an object"))
        return None
    asset_id = _parse_slug(_req(obj, "asset_id", where, col), f"{where}.asset_id", col)
    pos_raw = _req(obj, "position", where, col)
    heading = _req(obj, "heading", where, col)
    if asset_id is None or pos_raw is None or heading is None:
        return None
    position = _parse_geopoint(pos_raw, f"{where}.position", col)
    if position is None:
        return None
    if not _is_number(heading):
        col.error(SchemaError(f"{where}.heading", "expected degrees clockwise from north"))
        return None
    cam = obj.get("camera_height", DEFAULT_CAMERA_HEIGHT_M)
    if not _is_number(cam) or cam < 0:
        col.error(SchemaError(f"{where}.camera_height", "expected meters >= 0"))
        return None
    return asset_id, PanoPose(position, float(heading), float(cam))


def _parse_annotation(obj, where: str, col: ErrorCollector) -> PanoAnnotation | None:
    if not isinstance(obj, dict):
        col.error(SchemaError(where, "expected an object"))
        return None
    asset_id = _parse_slug(_req(obj, "pano_asset_id", where, col), f"{where}.pano_asset_id", col)
    label_raw = _req(obj, "label", where, col)
    if asset_id is None or label_raw is None:
        return None
    label = _parse_text(label_raw, f"{where}.label", col)
    if label is None:
        return None
    body = _parse_text(obj.get("body", ""), f"{where}.body", col) or LocalizedText("")

    has_dir = "direction" in obj
    has_target = "target" in obj
    if has_dir == has_target:
        col.error(SchemaError(where, "exactly one of 'direction' or 'target' must be present"))
        return None
    if has_dir:
        d = obj["direction"]
        if not isinstance(d, dict) or not _is_number(d.get("yaw")) or not _is_number(d.get("pitch")):
            col.error(SchemaError(f"{where}.direction", "expected {yaw, pitch} degrees"))
            return None
        yaw, pitch = float(d["yaw"]), float(d["pitch"])
        if not (-180.0 < yaw <= 180.0):
            col.error(SchemaError(f"{where}.direction.yaw", "expected degrees in (-180, 180]"))
            return None
        if not (-90.0 <= pitch <= 90.0):
            col.error(SchemaError(f"{where}.direction.pitch", "expected degrees in [-90, 90]"))
            return None
        return PanoAnnotation(asset_id, label, body, direction=(yaw, pitch))
    target = _parse_geopoint(obj["target"], f"{where}.target", col)
    if target is None:
        return None
    return PanoAnnotation(asset_id, label, body, target=target)


def load_manifest(path) -> SiteManifest:
    """Load and fully validate a site.json manifest (raises on first problem)."""
    manifest = load_manifest_collect(Path(path), ErrorCollector(strict=True))
    assert manifest is not None  # strict mode raises instead
    return manifest


def load_manifest_collect(path: Path, col: ErrorCollector) -> SiteManifest | None:
    """Collecting variant of load_manifest used by the compiler.

    Records every independent problem it can and returns a best-effort
    manifest (or None when the file itself is unusable).
    """
    path = Path(path)
    raw = path.read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        col.error(ManifestSyntaxError(f"not UTF-8: {exc}"), str(path))
        return None
    except json.JSONDecodeError as exc:
        col.error(ManifestSyntaxError(exc.msg, exc.lineno, exc.colno), str(path))
        return None
    if not isinstance(doc, dict):
        col.error(SchemaError("", "manifest root must be an object"), str(path))
        return None

    if doc.get("schema_version") != SCHEMA_VERSION:
        col.error(
            SchemaError("schema_version", f"expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
        )
        return None

    root = path.parent
    site_id = _parse_slug(_req(doc, "site_id", "", col), "site_id", col)
    title = _parse_text(_req(doc, "title", "", col), "title", col)
    description = _parse_text(doc.get("description", ""), "description", col)

    view = doc.get("initial_view")
    position, zoom = None, None
    if not isinstance(view, dict):
        col.error(SchemaError("initial_view", "expected {position, zoom}"))
    else:
        position = _parse_geopoint(view.get("position"), "initial_view.position", col)
        zoom = view.get("zoom")
        if not _is_number(zoom) or not (0 <= zoom <= 22):
            col.error(SchemaError("initial_view.zoom", "expected a number in [0, 22]"))
            zoom = None

    layers_raw = doc.get("layers")
    if not isinstance(layers_raw, list) or not layers_raw:
        col.error(SchemaError("layers", "at least 1 required"))
        return None

    assets: list[MediaAsset] = []
    asset_ids: set[str] = set()
    for i, a in enumerate(doc.get("assets", [])):
        parsed = _parse_asset(a, f"assets[{i}]", col)
        if parsed is None:
            continue
        if parsed.asset_id in asset_ids:
            col.error(DuplicateIdError(parsed.asset_id, "assets"))
            continue
        asset_ids.add(parsed.asset_id)
        assets.append(parsed)

    for i, a in enumerate(assets):
        target = a.resolve_path(root)
        if not target.is_file():
            col.error(
                SchemaError(f"assets[{i}].path", f"{a.path!r} does not exist or is not a regular file")
            )
        variant = a.render_hints.get("dollhouse_variant")
        if variant is not None and variant not in asset_ids:
            col.error(DanglingReferenceError(variant, f"assets[{i}].render_hints.dollhouse_variant"))

    layers: list[TemporalLayer] = []
    layer_ids: set[str] = set()
    for i, obj in enumerate(layers_raw):
        layer = _parse_layer(obj, f"layers[{i}]", col)
        if layer is None:
            continue
        if layer.layer_id in layer_ids:
            col.error(DuplicateIdError(layer.layer_id, "layers"))
            continue
        layer_ids.add(layer.layer_id)
        layers.append(layer)

    starts = [layer.period_start for layer in layers]
    if starts != sorted(starts):
        col.error(SchemaError("layers", "must be ordered by period_start ascending"))

    # Load and attach each layer's markers.
    loaded_layers: list[TemporalLayer] = []
    for i, layer in enumerate(layers):
        mpath = root / layer.markers_file
        where = layer.markers_file
        if not mpath.is_file():
            col.error(
                SchemaError(f"layers[{i}].markers_file", f"{layer.markers_file!r} does not exist")
            )
            loaded_layers.append(layer)
            continue
        try:
            features = parse_feature_collection(mpath.read_bytes())
        except (ManifestSyntaxError, GeoJsonError) as exc:
            col.error(exc, where)
            loaded_layers.append(layer)
            continue
        markers = markers_from_features(features, layer.layer_id, col)
        loaded_layers.append(
            TemporalLayer(
                layer_id=layer.layer_id,
                label=layer.label,
                period_start=layer.period_start,
                period_end=layer.period_end,
                base_style=layer.base_style,
                markers_file=layer.markers_file,
                overlays=layer.overlays,
                markers=tuple(markers),
            )
        )
    layers = loaded_layers

    poses: list[tuple[str, PanoPose]] = []
    for i, p in enumerate(doc.get("pano_poses", [])):
        parsed = _parse_pose(p, f"pano_poses[{i}]", col)
        if parsed is not None:
            poses.append(parsed)
    annotations: list[PanoAnnotation] = []
    for i, a in enumerate(doc.get("pano_annotations", [])):
        parsed = _parse_annotation(a, f"pano_annotations[{i}]", col)
        if parsed is not None:
            annotations.append(parsed)

    # Cross-reference checks.
    for i, layer in enumerate(layers):
        for j, ov in enumerate(layer.overlays):
            w = f"layers[{i}].overlays[{j}]"
            ov_asset = next((a for a in assets if a.asset_id == ov.asset_id), None)
            if ov_asset is None:
                col.error(DanglingReferenceError(ov.asset_id, w))
            elif ov_asset.kind != "image":
                col.error(SchemaError(f"{w}.asset_id", f"overlay asset must be an image, got {ov_asset.kind}"))
        for m in layer.markers:
            for aid in m.media:
                if aid not in asset_ids:
                    col.error(DanglingReferenceError(aid, f"marker {m.marker_id!r} media"))
                else:
                    a = next(x for x in assets if x.asset_id == aid)
                    allowed = KIND_MEDIA[m.kind]
                    if a.kind not in allowed:
                        col.error(
                            SchemaError(
                                f"marker {m.marker_id!r} media",
                                f"kind {m.kind!r} does not allow {a.kind!r} asset {aid!r}",
                            )
                        )

    pose_ids = set()
    for i, (aid, _) in enumerate(poses):
        if aid not in asset_ids:
            col.error(DanglingReferenceError(aid, f"pano_poses[{i}]"))
        if aid in pose_ids:
            col.error(DuplicateIdError(aid, "pano_poses"))
        pose_ids.add(aid)
    for i, ann in enumerate(annotations):
        if ann.pano_asset_id not in asset_ids:
            col.error(DanglingReferenceError(ann.pano_asset_id, f"pano_annotations[{i}]"))
        elif ann.target is not None and ann.pano_asset_id not in pose_ids:
            col.error(
                SchemaError(
                    f"pano_annotations[{i}]",
                    f"geo target requires a pano_pose for asset {ann.pano_asset_id!r}",
                )
            )

    # GCP pixels must sit inside their overlay image (header probe only;
    # unreadable/corrupt images are reported by asset validation instead).
    for i, layer in enumerate(layers):
        for j, ov in enumerate(layer.overlays):
            if not ov.gcps:
                continue
            ov_asset = next((a for a in assets if a.asset_id == ov.asset_id), None)
            if ov_asset is None:
                continue
            dims = _probe_dims_quietly(ov_asset.resolve_path(root))
            if dims is None:
                continue
            w_px, h_px = dims
            for k, gcp in enumerate(ov.gcps):
                px, py = gcp.pixel
                if not (0.0 <= px <= w_px and 0.0 <= py <= h_px):
                    col.error(
                        SchemaError(
                            f"layers[{i}].overlays[{j}].gcps[{k}].pixel",
                            f"({px}, {py}) outside {w_px}x{h_px} image",
                        )
                    )

    if site_id is None or title is None or position is None or zoom is None:
        return None

    return SiteManifest(
        site_id=site_id,
        title=title,
        description=description or LocalizedText(""),
        initial_position=position,
        initial_zoom=float(zoom),
        layers=tuple(layers),
        assets=tuple(assets),
        pano_poses=tuple(poses),
        pano_annotations=tuple(annotations),
        root=root,
    )


def _probe_dims_quietly(path: Path) -> tuple[int, int] | None:
    from .assets import probe_image

    try:
        info = probe_image(path.read_bytes())
    except (OSError, HeritageError):
        return None
    return info.width, info.height


# --- serialization -----------------------------------------------------------


def manifest_to_dict(m: SiteManifest) -> dict[str, Any]:
    """Serialize back to the site.json structure (round-trips through load)."""
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "site_id": m.site_id,
        "title": m.title.to_json(),
        "description": m.description.to_json(),
        "initial_view": {
            "position": _geopoint_json(m.initial_position),
            "zoom": m.initial_zoom,
        },
        "layers": [],
        "assets": [],
    }
    for layer in m.layers:
        l: dict[str, Any] = {
            "layer_id": layer.layer_id,
            "label": layer.label.to_json(),
            "period_start": layer.period_start,
            "base_style": layer.base_style,
            "markers_file": layer.markers_file,
        }
        if layer.period_end is not None:
            l["period_end"] = layer.period_end
        if layer.overlays:
            l["overlays"] = [_overlay_json(ov) for ov in layer.overlays]
        out["layers"].append(l)
    for a in m.assets:
        e: dict[str, Any] = {
            "asset_id": a.asset_id,
            "path": a.path,
            "kind": a.kind,
            "role": a.role,
        }
        if a.caption is not None:
            e["caption"] = a.caption.to_json()
        if a.render_hints:
            e["render_hints"] = a.render_hints
        out["assets"].append(e)
    if m.pano_poses:
        out["pano_poses"] = [
            {
                "asset_id": aid,
                "position": _geopoint_json(p.position),
                "heading": p.heading,
                "camera_height": p.camera_height,
            }
            for aid, p in m.pano_poses
        ]
    if m.pano_annotations:
        anns = []
        for ann in m.pano_annotations:
            e = {"pano_asset_id": ann.pano_asset_id, "label": ann.label.to_json()}
            if ann.body.default or ann.body.translations:
                e["body"] = ann.body.to_json()
            if ann.direction is not None:
                e["direction"] = {"yaw": ann.direction[0], "pitch": ann.direction[1]}
            else:
                e["target"] = _geopoint_json(ann.target)
            anns.append(e)
        out["pano_annotations"] = anns
    return out


def _geopoint_json(p: GeoPoint) -> list[float]:
    if p.height != 0.0:
        return [p.lon, p.lat, p.height]
    return [p.lon, p.lat]


def _overlay_json(ov: OverlayRef) -> dict[str, Any]:
    e: dict[str, Any] = {"asset_id": ov.asset_id, "opacity_default": ov.opacity_default}
    if ov.corners is not None:
        e["corners"] = {
            k: _geopoint_json(p) for k, p in zip(("nw", "ne", "se", "sw"), ov.corners)
        }
    else:
        e["gcps"] = [
            {"pixel": [g.pixel[0], g.pixel[1]], "geo": _geopoint_json(g.geo)}
            for g in ov.gcps
        ]
    return e
