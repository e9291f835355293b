"""Local HTTP/JSON API exposing the session: one state, many views.

Every response carries the generation of the snapshot it was computed from,
so clients can reconcile concurrent reads. JSON bodies are serialized with
the same canonical encoder as the CLI, making `GET /topology` byte-identical
to `pcaptopo --mode topology-json` for the same capture and filter.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .capture import FormatError
from .filters import ParseError
from .session import MAX_UPLOAD_BYTES, Session
from .topology import to_json_bytes

DEFAULT_PORT = 8460


class FilterBody(BaseModel):
    text: str = ""


def _json(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=to_json_bytes(payload), media_type="application/json", status_code=status_code
    )


def create_app(session: Session | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="pcaptopo", docs_url=None, redoc_url=None)
    if session is None:
        session = Session()
    app.state.session = session

    @app.post("/capture")
    async def upload_capture(request: Request):
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > MAX_UPLOAD_BYTES:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {"kind": "too_large", "message": "capture exceeds 500 MB limit"},
                },
                413,
            )
        data = await request.body()
        if len(data) > MAX_UPLOAD_BYTES:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {"kind": "too_large", "message": "capture exceeds 500 MB limit"},
                },
                413,
            )
        try:
            session.load_capture(data)
        except FormatError as err:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {
                        "kind": "format",
                        "magic_hex": err.magic_hex,
                        "message": str(err),
                    },
                },
                400,
            )
        return _json({"generation": session.snapshot().generation, "accepted": True}, 202)

    @app.post("/filter")
    async def set_filter(body: FilterBody):
        try:
            generation = session.set_filter(body.text)
        except ParseError as err:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {
                        "kind": "filter",
                        "position": err.position,
                        "message": err.message,
                    },
                },
                400,
            )
        except RuntimeError as err:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {"kind": "busy", "message": str(err)},
                },
                409,
            )
        return _json({"generation": generation, "ok": True})

    @app.get("/topology")
    async def get_topology():
        return _json(session.topology_payload())

    @app.get("/legend")
    async def get_legend():
        return _json(session.legend_payload())

    @app.get("/packets")
    async def get_packets(offset: int = 0, count: int = 100):
        try:
            return _json(session.packet_page(offset, count))
        except ValueError as err:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {"kind": "range", "message": str(err)},
                },
                400,
            )

    @app.get("/hosts/{key}/conversations")
    async def get_conversations(key: str):
        try:
            return _json(session.conversations_payload(key))
        except KeyError:
            return _json(
                {
                    "generation": session.snapshot().generation,
                    "error": {"kind": "unknown_host", "message": f"host {key!r} not in topology"},
                },
                404,
            )

    @app.get("/status")
    async def get_status():
        return _json(session.status_payload())

    bundle = _resolve_ui_dir(ui_dir)
    if bundle is not None:
        app.mount("/", StaticFiles(directory=bundle, html=True), name="ui")

    return app


def _resolve_ui_dir(ui_dir: str | Path | None) -> Path | None:
    candidates = []
    if ui_dir:
        candidates.append(Path(ui_dir))
    env = os.environ.get("PCAPTOPO_UI_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").is_file():
            return candidate
    return None


def serve(session: Session | None = None, port: int | None = None,
          ui_dir: str | Path | None = None, host: str = "127.0.0.1") -> None:
    """Run the API (and UI bundle, when present) on a local port."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("PCAPTOPO_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(session, ui_dir), host=host, port=port, log_level="warning")
