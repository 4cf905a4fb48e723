"""Serve a compiled bundle over HTTP.

Read-only, thread-per-request.  Assets are content-addressed, so they
are served with a one-year immutable Cache-Control and support single
byte-range requests for video scrubbing.  Every 2xx response carries an
ETag; every error body is a JSON envelope {"error", "code"}.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlsplit

log = logging.getLogger("heritage_forge.server")

CONTENT_TYPES = {
    ".glb": "model/gltf-binary",
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".mp4": "video/mp4",
    ".webm": "video/webm",
    ".ogg": "video/ogg",
    ".ogv": "video/ogg",
    ".mov": "video/quicktime",
    ".json": "application/json",
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".map": "application/json",
    ".txt": "text/plain; charset=utf-8",
}

IMMUTABLE_CACHE = "public, max-age=31536000, immutable"

_LAYER_ID_RE = re.compile(r"^[a-z0-9][a-z0-9_-]{0,63}$")
_RANGE_RE = re.compile(r"^bytes=(\d*)-(\d*)$")


@dataclass
class ServerConfig:
    bundle_dir: Path
    bind_address: str = "127.0.0.1"
    port: int = 8080
    cors_origins: list[str] | None = None  # None = allow all
    viewer_dir: Path | None = None

    def validate(self):
        site = Path(self.bundle_dir) / "site.json"
        try:
            doc = json.loads(site.read_bytes())
        except OSError as exc:
            raise ValueError(f"bundle_dir has no readable site.json: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"bundle site.json is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("schema_version") != 1:
            raise ValueError("bundle site.json has an unsupported schema_version")


def _etag_for(data: bytes) -> str:
    return '"' + hashlib.sha256(data).hexdigest()[:16] + '"'


class BundleHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "heritage-forge"
    config: ServerConfig  # set by make_server

    # -- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):
        log.info("%s %s", self.address_string(), fmt % args)

    def _cors_header(self) -> str | None:
        allowed = self.config.cors_origins
        if allowed is None:
            return "*"
        origin = self.headers.get("Origin")
        return origin if origin in allowed else None

    def _send(self, status: int, body: bytes, content_type: str, extra=None, head_only=False):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        cors = self._cors_header()
        if cors:
            self.send_header("Access-Control-Allow-Origin", cors)
        for key, value in (extra or {}).items():
            self.send_header(key, value)
        self.end_headers()
        if not head_only and body:
            self.wfile.write(body)

    def _send_json_error(self, status: int, code: str, message: str, head_only=False):
        body = (json.dumps({"error": message, "code": code}) + "\n").encode("utf-8")
        self._send(status, body, "application/json", head_only=head_only)

    def _client_etags(self) -> list[str]:
        raw = self.headers.get("If-None-Match")
        if not raw:
            return []
        return [tag.strip().removeprefix("W/") for tag in raw.split(",")]

    def _send_cached(self, data: bytes, content_type: str, extra=None, head_only=False):
        """200 with ETag, or 304 when If-None-Match matches."""
        etag = _etag_for(data)
        extra = {"ETag": etag, **(extra or {})}
        if etag in self._client_etags() or "*" in self._client_etags():
            self._send(304, b"", content_type, extra={"ETag": etag}, head_only=True)
            return
        self._send(200, data, content_type, extra=extra, head_only=head_only)

    # -- request routing ------------------------------------------------------

    def do_GET(self):
        self._handle(head_only=False)

    def do_HEAD(self):
        self._handle(head_only=True)

    def _handle(self, head_only: bool):
        try:
            path = unquote(urlsplit(self.path).path)
            if path == "/api/site":
                self._serve_site(head_only)
            elif path.startswith("/api/layers/"):
                self._serve_layer(path.removeprefix("/api/layers/"), head_only)
            elif path.startswith("/assets/"):
                self._serve_asset(path.removeprefix("/assets/"), head_only)
            elif self.config.viewer_dir is not None:
                self._serve_viewer(path, head_only)
            else:
                self._send_json_error(404, "not_found", "no such resource", head_only)
        except BrokenPipeError:
            pass
        except Exception:  # noqa: BLE001 - a handler crash must not kill the thread silently
            log.exception("error handling %s", self.path)
            try:
                self._send_json_error(500, "internal_error", "internal server error", head_only)
            except OSError:
                pass

    def _serve_site(self, head_only: bool):
        try:
            data = (Path(self.config.bundle_dir) / "site.json").read_bytes()
        except OSError:
            self._send_json_error(500, "bundle_unreadable", "bundle site.json unreadable", head_only)
            return
        self._send_cached(data, "application/json", head_only=head_only)

    def _serve_layer(self, layer_id: str, head_only: bool):
        if not _LAYER_ID_RE.match(layer_id):
            self._send_json_error(404, "not_found", "layer not found", head_only)
            return
        target = Path(self.config.bundle_dir) / "layers" / f"{layer_id}.json"
        try:
            data = target.read_bytes()
        except OSError:
            self._send_json_error(404, "not_found", "layer not found", head_only)
            return
        self._send_cached(data, "application/json", head_only=head_only)

    def _resolve_inside(self, base: Path, name: str) -> Path | None:
        """One path component inside base, or None (traversal, separators, dotfiles)."""
        if not name or "/" in name or "\\" in name or name.startswith(".") or ".." in name:
            return None
        try:
            target = (base / name).resolve()
            target.relative_to(base.resolve())
        except (ValueError, OSError):
            return None
        return target

    def _serve_asset(self, name: str, head_only: bool):
        base = Path(self.config.bundle_dir) / "assets"
        target = self._resolve_inside(base, name)
        if target is None or not target.is_file():
            self._send_json_error(404, "not_found", "asset not found", head_only)
            return
        data = target.read_bytes()
        content_type = CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
        # Content-addressed filename: the hash prefix is the ETag.
        etag = '"' + target.stem[:16] + '"'
        extra = {
            "ETag": etag,
            "Cache-Control": IMMUTABLE_CACHE,
            "Accept-Ranges": "bytes",
        }
        if etag in self._client_etags() or "*" in self._client_etags():
            self._send(304, b"", content_type, extra={"ETag": etag}, head_only=True)
            return

        range_header = self.headers.get("Range")
        if range_header:
            self._serve_range(data, content_type, range_header, extra, head_only)
            return
        self._send(200, data, content_type, extra=extra, head_only=head_only)

    def _serve_range(self, data, content_type, range_header, extra, head_only):
        size = len(data)
        m = _RANGE_RE.match(range_header.strip())
        if m is None:
            # Multipart and malformed ranges are rejected: single-range only.
            self._send_json_error(
                416, "range_not_satisfiable", "only single byte ranges are supported",
                head_only,
            )
            return
        start_s, end_s = m.group(1), m.group(2)
        if start_s == "" and end_s == "":
            self._send_json_error(416, "range_not_satisfiable", "empty range", head_only)
            return
        if start_s == "":  # suffix form: last N bytes
            length = int(end_s)
            if length == 0:
                self._send_range_unsatisfiable(size, head_only)
                return
            start, end = max(0, size - length), size - 1
        else:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
            if start >= size or (end_s and end < start):
                self._send_range_unsatisfiable(size, head_only)
                return
            end = min(end, size - 1)
        body = data[start : end + 1]
        extra = {
            **extra,
            "Content-Range": f"bytes {start}-{end}/{size}",
        }
        self._send(206, body, content_type, extra=extra, head_only=head_only)

    def _send_range_unsatisfiable(self, size: int, head_only: bool):
        body = (
            json.dumps({"error": "range not satisfiable", "code": "range_not_satisfiable"}) + "\n"
        ).encode("utf-8")
        self.send_response(416)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Content-Range", f"bytes */{size}")
        cors = self._cors_header()
        if cors:
            self.send_header("Access-Control-Allow-Origin", cors)
        self.end_headers()
        if not head_only:
            self.wfile.write(body)

    def _serve_viewer(self, path: str, head_only: bool):
        base = Path(self.config.viewer_dir)
        rel = path.lstrip("/") or "index.html"
        try:
            target = (base / rel).resolve()
            target.relative_to(base.resolve())
        except (ValueError, OSError):
            self._send_json_error(404, "not_found", "no such resource", head_only)
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send_json_error(404, "not_found", "no such resource", head_only)
            return
        data = target.read_bytes()
        content_type = CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
        self._send_cached(data, content_type, head_only=head_only)


def make_server(config: ServerConfig) -> ThreadingHTTPServer:
    """Validate the bundle and return a ready-to-serve ThreadingHTTPServer."""
    config.validate()
    handler = type("BoundBundleHandler", (BundleHandler,), {"config": config})
    server = ThreadingHTTPServer((config.bind_address, config.port), handler)
    server.daemon_threads = True
    return server


def serve(config: ServerConfig):
    server = make_server(config)
    host, port = server.server_address[:2]
    log.info("serving %s on http://%s:%s/", config.bundle_dir, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
