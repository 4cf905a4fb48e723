"""heritage-forge: compile, validate and serve geo-temporal heritage sites."""

from . import errors
from .assets import (
    GlbInfo,
    ImageInfo,
    check_equirectangular,
    derive_preview,
    probe_image,
    validate_glb,
)
from .compiler import Bundle, CompileReport, compile_site, content_hash, fit_bounds
from .georef import (
    AffineTransform,
    FitReport,
    PlanePoint,
    fit_affine,
    lonlat_to_webmercator,
    overlay_corners,
    webmercator_to_lonlat,
)
from .model import (
    GeoPoint,
    GroundControlPoint,
    LocalizedText,
    Marker,
    MediaAsset,
    OverlayRef,
    PanoAnnotation,
    PanoPose,
    SiteManifest,
    TemporalLayer,
    load_manifest,
    manifest_to_dict,
    markers_from_features,
    parse_feature_collection,
)
from .panogeo import (
    Direction,
    Uv,
    annotation_direction,
    direction_to_uv,
    haversine_distance,
    initial_bearing,
    uv_to_direction,
    wrap_yaw,
)
from .server import ServerConfig, make_server, serve

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "Bundle",
    "CompileReport",
    "Direction",
    "FitReport",
    "GeoPoint",
    "GlbInfo",
    "GroundControlPoint",
    "ImageInfo",
    "LocalizedText",
    "Marker",
    "MediaAsset",
    "OverlayRef",
    "PanoAnnotation",
    "PanoPose",
    "PlanePoint",
    "ServerConfig",
    "SiteManifest",
    "TemporalLayer",
    "Uv",
    "annotation_direction",
    "check_equirectangular",
    "compile_site",
    "content_hash",
    "derive_preview",
    "direction_to_uv",
    "errors",
    "fit_affine",
    "fit_bounds",
    "haversine_distance",
    "initial_bearing",
    "load_manifest",
    "lonlat_to_webmercator",
    "make_server",
    "manifest_to_dict",
    "markers_from_features",
    "overlay_corners",
    "parse_feature_collection",
    "probe_image",
    "serve",
    "uv_to_direction",
    "validate_glb",
    "webmercator_to_lonlat",
    "wrap_yaw",
    "__version__",
]
