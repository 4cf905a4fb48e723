"""Command line interface: validate, compile and serve heritage sites.

Exit codes: 0 success, 1 validation errors, 2 I/O failure.  Log
verbosity comes from the HERITAGE_FORGE_LOG environment variable
(error | warn | info | debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .assets import DEFAULT_PREVIEW_MAX_DIM
from .compiler import compile_site
from .server import ServerConfig, serve

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def _setup_logging():
    level = _LOG_LEVELS.get(os.environ.get("HERITAGE_FORGE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _print_report(report, as_json: bool):
    if as_json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(report.format_text())


def _cmd_validate(args) -> int:
    report, _ = compile_site(args.site_dir, write=False, max_preview=args.max_preview)
    _print_report(report, args.json)
    return 0 if report.ok else 1


def _cmd_compile(args) -> int:
    try:
        report, bundle = compile_site(
            args.site_dir, args.out_dir, max_preview=args.max_preview
        )
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 2
    _print_report(report, args.json)
    if not report.ok:
        return 1
    if not args.json:
        print(f"bundle written to {bundle.root}")
    return 0


def _cmd_serve(args) -> int:
    config = ServerConfig(
        bundle_dir=Path(args.bundle_dir),
        bind_address=args.bind,
        port=args.port,
        cors_origins=args.cors_origin or None,
        viewer_dir=Path(args.viewer_dir) if args.viewer_dir else None,
    )
    try:
        serve(config)
    except ValueError as exc:
        print(f"cannot serve: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heritage-forge",
        description="Compile and serve geo-temporal digital-heritage sites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a site directory, write nothing")
    p.add_argument("site_dir", type=Path)
    p.add_argument("--max-preview", type=int, default=DEFAULT_PREVIEW_MAX_DIM)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compile", help="compile a site into a content-addressed bundle")
    p.add_argument("site_dir", type=Path)
    p.add_argument("-o", "--out-dir", type=Path, required=True)
    p.add_argument("--max-preview", type=int, default=DEFAULT_PREVIEW_MAX_DIM)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("serve", help="serve a compiled bundle over HTTP")
    p.add_argument("bundle_dir", type=Path)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--viewer-dir", default=None, help="also serve these static files at /")
    p.add_argument(
        "--cors-origin",
        action="append",
        default=None,
        help="allowed CORS origin (repeatable); default allows all",
    )
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
