"""Resolving panorama annotations into view directions and image coordinates.

Directions are relative to the camera: yaw 0 at the pose heading,
positive clockwise; pitch positive up.  Pitch uses straight-line
elevation over great-circle ground distance - at heritage-site scale
the curvature term is below 0.005 degrees and is ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CoincidentError, DomainError, TooCloseError
from .model import GeoPoint, PanoPose

MEAN_EARTH_RADIUS_M = 6371008.8

# Below this ground distance the direction to a target is ill-conditioned.
MIN_TARGET_DISTANCE_M = 0.5


@dataclass(frozen=True)
class Direction:
    """Yaw in (-180, 180] degrees, pitch in [-90, 90] degrees."""

    yaw: float
    pitch: float

    def __post_init__(self):
        if not (-180.0 < self.yaw <= 180.0):
            raise DomainError(f"yaw {self.yaw} outside (-180, 180]")
        if not (-90.0 <= self.pitch <= 90.0):
            raise DomainError(f"pitch {self.pitch} outside [-90, 90]")


@dataclass(frozen=True)
class Uv:
    """Unitless equirectangular image coordinates, u across, v down."""

    u: float
    v: float

    def __post_init__(self):
        if not (0.0 <= self.u <= 1.0 and 0.0 <= self.v <= 1.0):
            raise DomainError(f"uv ({self.u}, {self.v}) outside [0, 1]")


def wrap_yaw(yaw: float) -> float:
    """Normalize any finite yaw into (-180, 180].  Total and idempotent."""
    r = math.fmod(yaw + 180.0, 360.0)
    if r <= 0.0:
        r += 360.0
    return r - 180.0


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle ground distance in meters (heights ignored)."""
    p1 = a.lat * math.pi / 180.0
    p2 = b.lat * math.pi / 180.0
    dp = p2 - p1
    dl = (b.lon - a.lon) * math.pi / 180.0
    h = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * MEAN_EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Initial great-circle bearing a -> b, degrees clockwise from north, [0, 360)."""
    if a.lon == b.lon and a.lat == b.lat:
        raise CoincidentError("bearing undefined for coincident points")
    p1 = a.lat * math.pi / 180.0
    p2 = b.lat * math.pi / 180.0
    dl = (b.lon - a.lon) * math.pi / 180.0
    theta = math.atan2(
        math.sin(dl) * math.cos(p2),
        math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dl),
    )
    deg = theta * 180.0 / math.pi
    return math.fmod(deg + 360.0, 360.0)


def annotation_direction(pose: PanoPose, target: GeoPoint) -> Direction:
    """Direction from a camera pose to a geo target (target.height above ground)."""
    ground = haversine_distance(pose.position, target)
    if ground <= MIN_TARGET_DISTANCE_M:
        raise TooCloseError(
            f"target {ground:.3f} m from camera (minimum {MIN_TARGET_DISTANCE_M} m)"
        )
    yaw = wrap_yaw(initial_bearing(pose.position, target) - pose.heading)
    eye_height = pose.position.height + pose.camera_height
    pitch = math.atan2(target.height - eye_height, ground) * 180.0 / math.pi
    return Direction(yaw, pitch)


def direction_to_uv(d: Direction) -> Uv:
    """Equirectangular mapping; image center = camera heading, yaw +180 -> u = 1."""
    return Uv(0.5 + d.yaw / 360.0, 0.5 - d.pitch / 180.0)


def uv_to_direction(uv: Uv) -> Direction:
    """Inverse mapping; the u = 0 seam wraps to yaw +180 (right edge owns it)."""
    return Direction(wrap_yaw((uv.u - 0.5) * 360.0), (0.5 - uv.v) * 180.0)
