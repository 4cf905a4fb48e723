"""Structural validation and metadata probing of binary media.

GLB containers are checked against the glTF 2.0 binary layout (12-byte
header plus 4-byte-aligned chunks, JSON chunk first); PNG and JPEG
headers are parsed for dimensions without decoding pixels.  Every probe
is bounds-checked: arbitrary input yields a typed error, never a crash,
and no read goes past the declared length.
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from ._kernels import box_downsample
from .errors import (
    AlignmentError,
    BadMagicError,
    ChunkOrderError,
    CorruptHeaderError,
    DecodeError,
    JsonChunkError,
    TruncatedFileError,
    UnknownFormatError,
    UnsupportedVersionError,
)

GLB_MAGIC = b"glTF"  # 0x46546C67 little-endian
CHUNK_JSON = b"JSON"
CHUNK_BIN = b"BIN\x00"

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
JPEG_SOI = b"\xff\xd8"
# Baseline and progressive frame headers; everything else is skipped
# as an opaque segment.
_JPEG_SOF = (0xC0, 0xC2)
_JPEG_STANDALONE = frozenset({0x01, *range(0xD0, 0xD9)})

VIDEO_EXTENSIONS = frozenset({".mp4", ".webm", ".ogg", ".ogv", ".mov"})

DEFAULT_PREVIEW_MAX_DIM = 1024


@dataclass(frozen=True)
class GlbInfo:
    """Structural facts about a GLB container."""

    version: int
    total_length: int
    chunks: tuple[tuple[bytes, int], ...]
    node_names: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class ImageInfo:
    format: str  # "png" | "jpeg"
    width: int
    height: int


def validate_glb(data: bytes) -> GlbInfo:
    """Validate the GLB container layout and extract node names.

    Checks the header (magic, version 2, declared = actual length) and
    walks the chunk list (4-byte alignment, JSON chunk first, chunks sum
    to the declared length).  The JSON chunk must parse as a JSON object;
    full glTF semantics are out of scope.
    """
    if len(data) < 4:
        raise TruncatedFileError(f"{len(data)} bytes is too short for a GLB header")
    if data[:4] != GLB_MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {GLB_MAGIC!r}")
    if len(data) < 12:
        raise TruncatedFileError(f"{len(data)} bytes is too short for a GLB header")
    version, declared = struct.unpack_from("<II", data, 4)
    if version != 2:
        raise UnsupportedVersionError(f"GLB version {version}, only 2 is supported")
    if declared != len(data):
        raise TruncatedFileError(f"declared length {declared}, actual {len(data)}")

    chunks: list[tuple[bytes, int]] = []
    node_names: tuple[str, ...] = ()
    offset = 12
    while offset < declared:
        if declared - offset < 8:
            raise TruncatedFileError(
                f"{declared - offset} trailing bytes cannot form a chunk header"
            )
        chunk_len, = struct.unpack_from("<I", data, offset)
        tag = bytes(data[offset + 4 : offset + 8])
        if chunk_len % 4 != 0:
            raise AlignmentError(f"chunk {tag!r} length {chunk_len} not 4-byte aligned")
        if offset + 8 + chunk_len > declared:
            raise TruncatedFileError(
                f"chunk {tag!r} of {chunk_len} bytes exceeds declared length"
            )
        if not chunks and tag != CHUNK_JSON:
            raise ChunkOrderError(f"first chunk is {tag!r}, expected {CHUNK_JSON!r}")
        if not chunks:
            payload = data[offset + 8 : offset + 8 + chunk_len]
            try:
                doc = json.loads(payload.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise JsonChunkError(f"JSON chunk does not parse: {exc}") from None
            if not isinstance(doc, dict):
                raise JsonChunkError("JSON chunk is not an object")
            nodes = doc.get("nodes")
            if isinstance(nodes, list):
                node_names = tuple(
                    n["name"]
                    for n in nodes
                    if isinstance(n, dict) and isinstance(n.get("name"), str)
                )
        chunks.append((tag, chunk_len))
        offset += 8 + chunk_len
    if not chunks:
        raise ChunkOrderError("GLB has no chunks; a JSON chunk is required")
    return GlbInfo(version, declared, tuple(chunks), node_names)


def _u32be(data: bytes, offset: int) -> int:
    return struct.unpack_from(">I", data, offset)[0]


def _probe_png(data: bytes) -> ImageInfo:
    # signature(8) + IHDR length(4) + "IHDR"(4) + width(4) + height(4)
    if len(data) < 24:
        raise CorruptHeaderError("PNG truncated before IHDR dimensions")
    if _u32be(data, 8) != 13 or data[12:16] != b"IHDR":
        raise CorruptHeaderError("PNG first chunk is not a 13-byte IHDR")
    width = _u32be(data, 16)
    height = _u32be(data, 20)
    if width < 1 or height < 1:
        raise CorruptHeaderError(f"PNG dimensions {width}x{height} invalid")
    return ImageInfo("png", width, height)


def _probe_jpeg(data: bytes) -> ImageInfo:
    pos = 2
    while True:
        # Resynchronize on the next 0xFF, skipping fill bytes.
        while pos < len(data) and data[pos] != 0xFF:
            pos += 1
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1
        if pos >= len(data):
            raise CorruptHeaderError("JPEG ends before a frame header")
        marker = data[pos]
        pos += 1
        if marker in _JPEG_STANDALONE:
            continue
        if marker == 0xD9:  # EOI
            raise CorruptHeaderError("JPEG has no frame header before EOI")
        if pos + 2 > len(data):
            raise CorruptHeaderError("JPEG segment length truncated")
        seg_len = struct.unpack_from(">H", data, pos)[0]
        if seg_len < 2:
            raise CorruptHeaderError(f"JPEG segment length {seg_len} invalid")
        if marker in _JPEG_SOF:
            if pos + 7 > len(data):
                raise CorruptHeaderError("JPEG frame header truncated")
            height = struct.unpack_from(">H", data, pos + 3)[0]
            width = struct.unpack_from(">H", data, pos + 5)[0]
            if width < 1 or height < 1:
                raise CorruptHeaderError(f"JPEG dimensions {width}x{height} invalid")
            return ImageInfo("jpeg", width, height)
        pos += seg_len
        if pos > len(data):
            raise CorruptHeaderError("JPEG segment runs past end of data")


def probe_image(data: bytes) -> ImageInfo:
    """Read format and dimensions from PNG/JPEG headers; no pixel decode."""
    if data[:8] == PNG_SIGNATURE:
        return _probe_png(data)
    if data[:2] == JPEG_SOI:
        return _probe_jpeg(data)
    raise UnknownFormatError("neither PNG nor JPEG signature")


def check_equirectangular(info: ImageInfo) -> str:
    """'pass' for exact 2:1, 'warn' within 1% of 2:1, 'fail' otherwise."""
    if info.width == 2 * info.height:
        return "pass"
    if abs(info.width / info.height - 2.0) <= 0.01:
        return "warn"
    return "fail"


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _decode_pixels(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as img:
            if img.mode in ("P", "PA", "LA") or "transparency" in img.info:
                img = img.convert("RGBA")
            elif img.mode not in ("L", "RGB", "RGBA"):
                img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from None
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return arr


def derive_preview(data: bytes, max_dim: int = DEFAULT_PREVIEW_MAX_DIM) -> bytes:
    """Downsample an image so its longest side is at most max_dim.

    Area-average (box) filter, aspect preserved with half-up rounding,
    PNG output.  Images already within max_dim pass through byte-identical.
    """
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    info = probe_image(data)
    if max(info.width, info.height) <= max_dim:
        return data

    arr = _decode_pixels(data)
    h, w = arr.shape[0], arr.shape[1]
    if w >= h:
        out_w = max_dim
        out_h = max(1, _round_half_up(h * max_dim / w))
    else:
        out_h = max_dim
        out_w = max(1, _round_half_up(w * max_dim / h))
    means = box_downsample(arr, out_h, out_w)
    pixels = np.clip(np.floor(means + 0.5), 0.0, 255.0).astype(np.uint8)
    if pixels.shape[2] == 1:
        out_img = Image.fromarray(pixels[:, :, 0], mode="L")
    else:
        out_img = Image.fromarray(pixels)
    buf = io.BytesIO()
    out_img.save(buf, format="PNG")
    return buf.getvalue()
