"""Placing historical raster maps on the web map.

Spherical Web Mercator (EPSG:3857) projection, least-squares affine
estimation from ground control points, and overlay corner computation.
All functions are pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import DEG2RAD, EARTH_RADIUS_M, QUARTER_PI, RAD2DEG
from .errors import DegenerateError, DomainError, SingularError
from .model import GeoPoint, GroundControlPoint

# Largest |x| = |y| on the Mercator plane: R * pi.
PLANE_LIMIT_M = 20037508.342789244
# The GeoPoint latitude bound (85.051129 deg) is a hair beyond the exact
# Mercator limit; it projects ~0.29 m past R*pi, hence the slack.
PLANE_SLACK_M = 0.5

# Compile-time quality gates for GCP fits, in meters.
RMSE_WARN_M = 15.0
RMSE_ERROR_M = 100.0


def lonlat_to_webmercator(p: GeoPoint) -> "PlanePoint":
    """Project WGS84 degrees to EPSG:3857 meters.

    x = R*lam, y = R*ln tan(pi/4 + phi/2); y is evaluated as the
    equivalent R*atanh(sin phi), which is exact at the equator.
    """
    if not (GeoPoint.LAT_MIN <= p.lat <= GeoPoint.LAT_MAX):
        raise DomainError(f"latitude {p.lat} beyond Web Mercator limit")
    x = EARTH_RADIUS_M * (p.lon * DEG2RAD)
    y = EARTH_RADIUS_M * math.atanh(math.sin(p.lat * DEG2RAD))
    return PlanePoint(x, y)


def webmercator_to_lonlat(p: "PlanePoint") -> GeoPoint:
    """Inverse of :func:`lonlat_to_webmercator`."""
    lon = (p.x / EARTH_RADIUS_M) * RAD2DEG
    lat = (2.0 * math.atan(math.exp(p.y / EARTH_RADIUS_M)) - 2.0 * QUARTER_PI) * RAD2DEG
    # Clamp projection round-off so the GeoPoint domain check cannot
    # reject a point that started inside it.
    lon = min(max(lon, -180.0), 180.0)
    lat = min(max(lat, GeoPoint.LAT_MIN), GeoPoint.LAT_MAX)
    return GeoPoint(lon, lat)


@dataclass(frozen=True)
class PlanePoint:
    """EPSG:3857 easting/northing in meters."""

    x: float
    y: float

    def __post_init__(self):
        lim = PLANE_LIMIT_M + PLANE_SLACK_M
        if not (abs(self.x) <= lim and abs(self.y) <= lim):
            raise DomainError(f"({self.x}, {self.y}) outside Web Mercator plane")


@dataclass(frozen=True)
class AffineTransform:
    """Maps image pixels (x right, y down) to plane meters.

    (px, py) -> (a*px + b*py + c, d*px + e*py + f)
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def __post_init__(self):
        if self.det == 0.0:
            raise SingularError("affine transform is not invertible (det = 0)")

    @property
    def det(self) -> float:
        return self.a * self.e - self.b * self.d

    def apply(self, px: float, py: float) -> PlanePoint:
        return PlanePoint(
            self.a * px + self.b * py + self.c,
            self.d * px + self.e * py + self.f,
        )

    def coefficients(self) -> tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)


@dataclass(frozen=True)
class FitReport:
    """Result of a GCP fit: the transform plus per-point diagnostics."""

    transform: AffineTransform
    residuals_m: tuple[float, ...] = field(default=())
    rmse_m: float = 0.0


# Relative gap between the two singular values of the centered pixel
# cloud below which the GCPs are treated as collinear.
_COLLINEAR_RTOL = 1e-12


def fit_affine(
    gcps: Sequence[GroundControlPoint],
    image_size: tuple[int, int] | None = None,
) -> FitReport:
    """Least-squares affine fit of GCP pixels onto projected GCP geos.

    Minimizes sum ||A(pixel_i) - mercator(geo_i)||^2.  Pixels and targets
    are centered on their centroids before solving, which keeps the
    recovered coefficients accurate when translations are large.
    """
    if len(gcps) < 3:
        raise DegenerateError(f"need at least 3 GCPs, got {len(gcps)}")
    if image_size is not None:
        w, h = image_size
        for i, g in enumerate(gcps):
            px, py = g.pixel
            if not (0.0 <= px <= w and 0.0 <= py <= h):
                raise DomainError(
                    f"gcps[{i}].pixel ({px}, {py}) outside {w}x{h} image"
                )

    pix = np.array([g.pixel for g in gcps], dtype=np.float64)
    planes = [lonlat_to_webmercator(g.geo) for g in gcps]
    tgt = np.array([(p.x, p.y) for p in planes], dtype=np.float64)

    pix_mean = pix.mean(axis=0)
    tgt_mean = tgt.mean(axis=0)
    pc = pix - pix_mean
    sv = np.linalg.svd(pc, compute_uv=False)
    if sv[0] == 0.0 or sv[1] <= _COLLINEAR_RTOL * sv[0]:
        raise DegenerateError("GCP pixel points are collinear")

    # Two independent 2-coefficient systems for the linear part.
    sol, _, rank, _ = np.linalg.lstsq(pc, tgt - tgt_mean, rcond=None)
    if rank < 2:
        raise SingularError("rank-deficient GCP system")
    a, d = sol[0]
    b, e = sol[1]
    c = tgt_mean[0] - a * pix_mean[0] - b * pix_mean[1]
    f = tgt_mean[1] - d * pix_mean[0] - e * pix_mean[1]
    if a * e - b * d == 0.0:
        raise SingularError("fitted transform is singular (geo targets degenerate)")
    transform = AffineTransform(a, b, c, d, e, f)

    fitted = pix @ np.array([[a, d], [b, e]]) + np.array([c, f])
    residuals = np.sqrt(((fitted - tgt) ** 2).sum(axis=1))
    rmse = math.sqrt(float((residuals**2).mean()))
    return FitReport(transform, tuple(float(r) for r in residuals), rmse)


def overlay_corners(
    t: AffineTransform, width_px: float, height_px: float
) -> tuple[GeoPoint, GeoPoint, GeoPoint, GeoPoint]:
    """Geographic corners of a width x height image: NW, NE, SE, SW.

    Corner order follows the image: top-left, top-right, bottom-right,
    bottom-left (pixel y points down).
    """
    if width_px <= 0 or height_px <= 0:
        raise DomainError("image dimensions must be positive")
    pixel_corners = (
        (0.0, 0.0),
        (float(width_px), 0.0),
        (float(width_px), float(height_px)),
        (0.0, float(height_px)),
    )
    nw, ne, se, sw = (webmercator_to_lonlat(t.apply(px, py)) for px, py in pixel_corners)
    return nw, ne, se, sw
