"""Batch command line interface.

Subcommands: ``render`` (project JSON to SVG), ``tools poly2points``,
``tools normalize`` and ``serve``.  Exit codes: 0 success, 2 invalid input,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .analytics import normalize_tool
from .errors import InputError, NoConvergence
from .ingest import parse_regions, polygons_to_points, serialize_nodes_csv
from .model import load_project
from .scene import render_svg

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"input file not found: {path}")
    return p.read_bytes()


def _load_distance_csv(path: str) -> dict[tuple[str, str], float]:
    text = _read_bytes(path).decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["origin", "dest", "distance"]:
        raise InputError(
            f"distance file {path} needs header 'origin,dest,distance'"
        )
    out: dict[tuple[str, str], float] = {}
    for cells in rows[1:]:
        if not cells or (len(cells) == 1 and not cells[0]):
            continue
        if len(cells) != 3:
            raise InputError(f"distance file {path}: malformed row {cells!r}")
        out[(cells[0].strip(), cells[1].strip())] = float(cells[2])
    return out


def _cmd_render(args: argparse.Namespace) -> int:
    project = load_project(_read_bytes(args.project))
    svg = render_svg(project, selection=args.selection, decimals=args.decimals)
    Path(args.output).write_bytes(svg)
    return EXIT_OK


def _cmd_poly2points(args: argparse.Namespace) -> int:
    features = parse_regions(_read_bytes(args.regions), args.id_property)
    points = polygons_to_points(features)
    Path(args.output).write_text(serialize_nodes_csv(points), encoding="utf-8")
    return EXIT_OK


def _cmd_normalize(args: argparse.Namespace) -> int:
    distances = _load_distance_csv(args.distances) if args.distances else None
    csv_text = normalize_tool(
        _read_bytes(args.flows),
        _read_bytes(args.nodes) if args.nodes else None,
        model=args.model.replace("-", "_"),
        beta=args.beta,
        distances=distances,
        origin_field=args.origin_field,
        dest_field=args.dest_field,
        value_field=args.value_field,
        id_field=args.id_field,
        x_field=args.x_field,
        y_field=args.y_field,
    )
    Path(args.output).write_text(csv_text, encoding="utf-8")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odflow",
        description="Origin-destination flow map engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a project file to SVG")
    render.add_argument("project", help="project JSON path")
    render.add_argument("-o", "--output", required=True, help="output SVG path")
    render.add_argument("--selection", default=None,
                        help="node id to highlight; other flows are dimmed")
    render.add_argument("--decimals", type=int, default=None,
                        help="coordinate decimals 1..6 (default: project setting)")
    render.set_defaults(func=_cmd_render)

    tools = sub.add_parser("tools", help="data processing tools")
    tools_sub = tools.add_subparsers(dest="tool", required=True)

    p2p = tools_sub.add_parser("poly2points",
                               help="polygon GeoJSON to centroid point CSV")
    p2p.add_argument("regions", help="GeoJSON path")
    p2p.add_argument("-o", "--output", required=True, help="output CSV path")
    p2p.add_argument("--id-property", default=None,
                     help="feature property to use as the point id")
    p2p.set_defaults(func=_cmd_poly2points)

    norm = tools_sub.add_parser("normalize",
                                help="transform raw flows into modularity flows")
    norm.add_argument("--flows", required=True, help="flow CSV path")
    norm.add_argument("--nodes", default=None, help="node CSV path (gravity distances)")
    norm.add_argument("--model", default="adjusted-paper",
                      choices=["adjusted-paper", "adjusted-conserving", "gravity"])
    norm.add_argument("--beta", type=float, default=None,
                      help="gravity distance-decay exponent (default 2)")
    norm.add_argument("--distances", default=None,
                      help="CSV with origin,dest,distance columns")
    norm.add_argument("-o", "--output", required=True, help="output CSV path")
    norm.add_argument("--origin-field", default="origin")
    norm.add_argument("--dest-field", default="dest")
    norm.add_argument("--value-field", default="value")
    norm.add_argument("--id-field", default="id")
    norm.add_argument("--x-field", default="X")
    norm.add_argument("--y-field", default="Y")
    norm.set_defaults(func=_cmd_normalize)

    serve = sub.add_parser("serve", help="run the HTTP design service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8008)
    serve.add_argument("--data-dir", default="./odflow-projects",
                       help="directory for stored projects")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
