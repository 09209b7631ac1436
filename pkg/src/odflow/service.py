"""HTTP design service.

JSON in, SVG/CSV out; rendering goes through the same code path as the CLI
so both produce identical bytes for the same project.  Projects are stored
as flat JSON files keyed by the SHA-256 of their canonical serialization,
which makes storage idempotent and ids shareable.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .analytics import normalize_tool
from .errors import InputError, NoConvergence, OdflowError
from .ingest import parse_regions, polygons_to_points, serialize_nodes_csv
from .model import load_project, save_project
from .scene import render_svg

DEFAULT_MAX_BODY = 50 * 1024 * 1024
MAX_BODY_ENV = "ODFLOW_MAX_BODY"
CORS_ENV = "ODFLOW_CORS_ORIGINS"

_PROJECT_ID_RE = re.compile(r"[0-9a-f]{64}")


def _store_project(data_dir: Path, payload: bytes) -> str:
    project = load_project(payload)
    canonical = save_project(project).encode("utf-8")
    project_id = hashlib.sha256(canonical).hexdigest()
    target = data_dir / f"{project_id}.json"
    if not target.exists():
        fd, tmp = tempfile.mkstemp(dir=data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(canonical)
            os.replace(tmp, target)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
    return project_id


def create_app(data_dir: str | Path, max_body: int | None = None,
               cors_origins: list[str] | None = None) -> FastAPI:
    """Build the service app with a writable project store directory."""
    data_path = Path(data_dir)
    data_path.mkdir(parents=True, exist_ok=True)
    if max_body is None:
        max_body = int(os.environ.get(MAX_BODY_ENV, DEFAULT_MAX_BODY))
    if cors_origins is None:
        cors_origins = [
            o.strip() for o in os.environ.get(CORS_ENV, "*").split(",") if o.strip()
        ]

    app = FastAPI(title="odflow", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and length.isdigit() and int(length) > max_body:
            return JSONResponse(
                {"error": "PayloadTooLarge",
                 "detail": f"body exceeds {max_body} bytes"},
                status_code=413,
            )
        return await call_next(request)

    @app.exception_handler(NoConvergence)
    async def no_convergence(request: Request, exc: NoConvergence):
        return JSONResponse(
            {"error": "NoConvergence", "detail": str(exc),
             "residual": exc.residual, "iterations": exc.iterations},
            status_code=400,
        )

    @app.exception_handler(OdflowError)
    async def input_error(request: Request, exc: OdflowError):
        return JSONResponse(
            {"error": type(exc).__name__, "detail": str(exc)}, status_code=400
        )

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/projects")
    async def store(request: Request):
        payload = await request.body()
        return {"id": _store_project(data_path, payload)}

    @app.get("/projects/{project_id}")
    async def fetch(project_id: str):
        if not _PROJECT_ID_RE.fullmatch(project_id):
            return JSONResponse(
                {"error": "NotFound", "detail": f"unknown project {project_id!r}"},
                status_code=404,
            )
        target = data_path / f"{project_id}.json"
        if not target.is_file():
            return JSONResponse(
                {"error": "NotFound", "detail": f"unknown project {project_id!r}"},
                status_code=404,
            )
        return Response(target.read_bytes(), media_type="application/json")

    @app.post("/render")
    async def render(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise InputError("render request must be a JSON object")
        inline = body.get("project")
        project_id = body.get("project_id")
        if (inline is None) == (project_id is None):
            raise InputError("provide exactly one of 'project' or 'project_id'")
        if inline is not None:
            import json as _json

            project = load_project(_json.dumps(inline))
        else:
            if not isinstance(project_id, str) or not _PROJECT_ID_RE.fullmatch(project_id):
                return JSONResponse(
                    {"error": "NotFound", "detail": f"unknown project {project_id!r}"},
                    status_code=404,
                )
            target = data_path / f"{project_id}.json"
            if not target.is_file():
                return JSONResponse(
                    {"error": "NotFound", "detail": f"unknown project {project_id!r}"},
                    status_code=404,
                )
            project = load_project(target.read_bytes())
        svg = render_svg(
            project,
            selection=body.get("selection"),
            decimals=body.get("decimals"),
        )
        return Response(svg, media_type="image/svg+xml")

    @app.post("/tools/poly2points")
    async def poly2points(request: Request, id_property: str | None = None):
        features = parse_regions(await request.body(), id_property)
        return PlainTextResponse(
            serialize_nodes_csv(polygons_to_points(features)), media_type="text/csv"
        )

    @app.post("/tools/normalize")
    async def normalize(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "flows_csv" not in body:
            raise InputError("normalize request needs a 'flows_csv' field")
        distances = None
        if body.get("distances") is not None:
            distances = {
                (str(o), str(d)): float(v) for o, d, v in body["distances"]
            }
        csv_text = normalize_tool(
            body["flows_csv"],
            body.get("nodes_csv"),
            model=str(body.get("model", "adjusted_paper")).replace("-", "_"),
            beta=body.get("beta"),
            distances=distances,
            origin_field=body.get("origin_field", "origin"),
            dest_field=body.get("dest_field", "dest"),
            value_field=body.get("value_field", "value"),
            id_field=body.get("id_field", "id"),
            x_field=body.get("x_field", "X"),
            y_field=body.get("y_field", "Y"),
        )
        return PlainTextResponse(csv_text, media_type="text/csv")

    return app
