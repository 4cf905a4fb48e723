"""Numeric hot kernels: area-average image downsampling and bulk Web
Mercator projection.

Each kernel has two interchangeable implementations: a numba ``@njit``
loop and a pure-numpy fallback.  The active backend is chosen per call
from the ``HERITAGE_FORGE_NUMBA`` environment variable:

* unset / ``1`` / ``on``   -> numba when importable, numpy otherwise
* ``0`` / ``off`` / ``numpy`` -> force the numpy path

Both paths share the same formulas; per-backend output is deterministic.
``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import math
import os

import numpy as np

EARTH_RADIUS_M = 6378137.0  # spherical Web Mercator (EPSG:3857)
DEG2RAD = math.pi / 180.0
RAD2DEG = 180.0 / math.pi
QUARTER_PI = math.pi / 4.0

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


def use_numba() -> bool:
    """True when the numba backend is active for this call."""
    flag = os.environ.get("HERITAGE_FORGE_NUMBA", "1").strip().lower()
    if flag in ("0", "off", "false", "numpy", "no"):
        return False
    return _HAVE_NUMBA


def active_backend() -> str:
    return "numba" if use_numba() else "numpy"


# --- area-average (box) downsampling ------------------------------------
#
# Output pixel (oy, ox) is the mean of the source rectangle
# [oy*sy, (oy+1)*sy) x [ox*sx, (ox+1)*sx), fractional edge pixels
# weighted by coverage.  Exact for constant images by construction
# (normalised by the accumulated weight, not the nominal area).


@njit(cache=True)
def _box_downsample_nb(img, out):  # pragma: no cover - exercised via wrapper
    in_h, in_w, nc = img.shape
    out_h, out_w = out.shape[0], out.shape[1]
    sy = in_h / out_h
    sx = in_w / out_w
    for oy in range(out_h):
        y0 = oy * sy
        y1 = (oy + 1) * sy
        if y1 > in_h:
            y1 = in_h
        iy0 = int(math.floor(y0))
        iy1 = int(math.ceil(y1))
        if iy1 > in_h:
            iy1 = in_h
        for ox in range(out_w):
            x0 = ox * sx
            x1 = (ox + 1) * sx
            if x1 > in_w:
                x1 = in_w
            ix0 = int(math.floor(x0))
            ix1 = int(math.ceil(x1))
            if ix1 > in_w:
                ix1 = in_w
            for c in range(nc):
                acc = 0.0
                wsum = 0.0
                for iy in range(iy0, iy1):
                    wy = min(y1, iy + 1.0) - max(y0, float(iy))
                    for ix in range(ix0, ix1):
                        wx = min(x1, ix + 1.0) - max(x0, float(ix))
                        w = wy * wx
                        acc += w * img[iy, ix, c]
                        wsum += w
                out[oy, ox, c] = acc / wsum


def _resample_axis0_np(img: np.ndarray, out_n: int) -> np.ndarray:
    """Exact per-window means along axis 0 via interpolated prefix sums."""
    in_n = img.shape[0]
    s = in_n / out_n
    edges = np.arange(out_n + 1, dtype=np.float64) * s
    edges[-1] = float(in_n)
    np.minimum(edges, float(in_n), out=edges)
    prefix = np.concatenate(
        [np.zeros((1,) + img.shape[1:]), np.cumsum(img, axis=0)], axis=0
    )
    idx = edges.astype(np.int64)
    frac = edges - idx
    tail = np.broadcast_to(
        frac.reshape((-1,) + (1,) * (img.ndim - 1)), (out_n + 1,) + img.shape[1:]
    )
    vals = prefix[idx] + tail * img[np.minimum(idx, in_n - 1)]
    sums = vals[1:] - vals[:-1]
    widths = np.diff(edges).reshape((-1,) + (1,) * (img.ndim - 1))
    return sums / widths


def _box_downsample_np(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    tmp = _resample_axis0_np(img, out_h)
    tmp = _resample_axis0_np(np.swapaxes(tmp, 0, 1), out_w)
    return np.ascontiguousarray(np.swapaxes(tmp, 0, 1))


def box_downsample(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Downsample (H, W, C) float64 pixel data to (out_h, out_w, C) means.

    Requires out_h <= H and out_w <= W (strict downsampling plus the
    identity case).
    """
    if img.ndim != 3:
        raise ValueError("expected (H, W, C) array")
    in_h, in_w = img.shape[0], img.shape[1]
    if not (1 <= out_h <= in_h and 1 <= out_w <= in_w):
        raise ValueError(f"bad target {out_h}x{out_w} for source {in_h}x{in_w}")
    img = np.ascontiguousarray(img, dtype=np.float64)
    if use_numba():
        out = np.empty((out_h, out_w, img.shape[2]), dtype=np.float64)
        _box_downsample_nb(img, out)
        return out
    return _box_downsample_np(img, out_h, out_w)


# --- bulk Web Mercator projection ----------------------------------------


@njit(cache=True)
def _merc_fwd_nb(lon, lat, x, y):  # pragma: no cover - exercised via wrapper
    for i in range(lon.shape[0]):
        x[i] = EARTH_RADIUS_M * (lon[i] * DEG2RAD)
        # R*ln tan(pi/4 + phi/2), as atanh(sin phi): exact at the equator
        y[i] = EARTH_RADIUS_M * math.atanh(math.sin(lat[i] * DEG2RAD))


@njit(cache=True)
def _merc_inv_nb(x, y, lon, lat):  # pragma: no cover - exercised via wrapper
    for i in range(x.shape[0]):
        lon[i] = (x[i] / EARTH_RADIUS_M) * RAD2DEG
        lat[i] = (
            2.0 * math.atan(math.exp(y[i] / EARTH_RADIUS_M)) - 2.0 * QUARTER_PI
        ) * RAD2DEG


def _merc_fwd_np(lon, lat):
    x = EARTH_RADIUS_M * (lon * DEG2RAD)
    y = EARTH_RADIUS_M * np.arctanh(np.sin(lat * DEG2RAD))
    return x, y


def _merc_inv_np(x, y):
    lon = (x / EARTH_RADIUS_M) * RAD2DEG
    lat = (2.0 * np.arctan(np.exp(y / EARTH_RADIUS_M)) - 2.0 * QUARTER_PI) * RAD2DEG
    return lon, lat


def mercator_forward_many(lon: np.ndarray, lat: np.ndarray):
    """Project arrays of WGS84 degrees to EPSG:3857 meters."""
    lon = np.ascontiguousarray(lon, dtype=np.float64)
    lat = np.ascontiguousarray(lat, dtype=np.float64)
    if use_numba():
        x = np.empty_like(lon)
        y = np.empty_like(lat)
        _merc_fwd_nb(lon, lat, x, y)
        return x, y
    return _merc_fwd_np(lon, lat)


def mercator_inverse_many(x: np.ndarray, y: np.ndarray):
    """Unproject arrays of EPSG:3857 meters back to WGS84 degrees."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if use_numba():
        lon = np.empty_like(x)
        lat = np.empty_like(y)
        _merc_inv_nb(x, y, lon, lat)
        return lon, lat
    return _merc_inv_np(x, y)
