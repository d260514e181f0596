"""HTTP service wrapping the engine.

Sessions live server-side; the UI and the CLI are thin clients over these
endpoints. Each session processes commands strictly sequentially, and a
server-sent event stream pushes trace/state updates to subscribers.
"""

from __future__ import annotations

import asyncio
import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..config import data_path
from ..errors import EngineError
from ..session import EngineRuntime, Session
from .models import (
    CommandRequest,
    SelectionRequest,
    SessionCreated,
    SessionCreateRequest,
    SuitInfo,
    SuitLoadRequest,
    SuitUploaded,
    TraceDict,
)


@dataclass
class SessionBox:
    session: Session
    subscribers: list[asyncio.Queue] = field(default_factory=list)


def create_app(
    runtime: EngineRuntime | None = None,
    static_dir: str | Path | None = None,
    store_path: str | None = None,
    preload_suits: bool = True,
) -> FastAPI:
    runtime = runtime or EngineRuntime()
    if preload_suits:
        runtime.add_suit_file(str(data_path("shapes.suit.json")))

    app = FastAPI(title="nlcmd", version="0.1.0")
    boxes: dict[str, SessionBox] = {}

    def box_of(session_id: str) -> SessionBox:
        box = boxes.get(session_id)
        if box is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return box

    async def publish(box: SessionBox, event: str, data: dict[str, Any]) -> None:
        for queue in list(box.subscribers):
            await queue.put((event, data))

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": exc.to_json_dict()})

    @app.post("/api/session", response_model=SessionCreated)
    async def create_session(body: SessionCreateRequest) -> SessionCreated:
        session = Session(
            runtime,
            language_id=body.language,
            adapter_id=body.adapter,
            store_path=store_path,
        )
        session_id = uuid.uuid4().hex[:12]
        boxes[session_id] = SessionBox(session)
        return SessionCreated(id=session_id)

    @app.post("/api/session/{session_id}/command")
    async def run_command(session_id: str, body: CommandRequest) -> TraceDict:
        box = box_of(session_id)
        trace = await asyncio.to_thread(box.session.process_command, body.text)
        await publish(box, "trace", trace)
        await publish(box, "state", box.session.state_json())
        return trace

    @app.post("/api/session/{session_id}/selection")
    async def apply_selection(session_id: str, body: SelectionRequest) -> TraceDict:
        box = box_of(session_id)
        trace = await asyncio.to_thread(
            box.session.select_suggestion, body.surface, body.index
        )
        await publish(box, "trace", trace)
        await publish(box, "state", box.session.state_json())
        return trace

    @app.get("/api/session/{session_id}/state")
    async def session_state(session_id: str) -> dict[str, Any]:
        return box_of(session_id).session.state_json()

    @app.post("/api/session/{session_id}/adapter")
    async def switch_adapter(session_id: str, body: dict[str, str]) -> dict[str, Any]:
        box = box_of(session_id)
        box.session.switch_adapter(body.get("adapter", ""))
        await publish(box, "state", box.session.state_json())
        return {"adapter": box.session.adapter_id}

    @app.post("/api/session/{session_id}/suit")
    async def load_session_suit(session_id: str, body: SuitLoadRequest) -> dict[str, Any]:
        box = box_of(session_id)
        blob = runtime.suit_files.get(body.suit_id)
        if blob is None:
            raise HTTPException(status_code=404, detail="unknown suit")
        suit = box.session.load_suit_source(blob)
        await publish(box, "state", box.session.state_json())
        return {"id": suit.meta.id, "adapter": suit.adapter_id}

    @app.get("/api/suits", response_model=list[SuitInfo])
    async def list_suits() -> list[SuitInfo]:
        return [
            SuitInfo(
                id=s.meta.id,
                name=s.meta.name,
                version=s.meta.version,
                language_id=s.meta.language_id,
                adapter_id=s.adapter_id,
            )
            for s in runtime.stored_suits()
        ]

    @app.post("/api/suits", response_model=SuitUploaded)
    async def upload_suit(request: Request) -> SuitUploaded:
        raw = await request.body()
        suit = runtime.add_suit_file(raw)
        return SuitUploaded(id=suit.meta.id)

    @app.get("/api/suits/{suit_id}")
    async def download_suit(suit_id: str) -> Any:
        blob = runtime.suit_files.get(suit_id)
        if blob is None:
            raise HTTPException(status_code=404, detail="unknown suit")
        return JSONResponse(content=json.loads(blob.decode("utf-8")))

    @app.get("/api/events/{session_id}")
    async def events(session_id: str, request: Request) -> StreamingResponse:
        box = box_of(session_id)
        queue: asyncio.Queue = asyncio.Queue()
        box.subscribers.append(queue)

        async def stream():
            try:
                yield "event: ready\ndata: {}\n\n"
                while True:
                    if await request.is_disconnected():
                        break
                    try:
                        event, data = await asyncio.wait_for(queue.get(), timeout=15.0)
                    except asyncio.TimeoutError:
                        yield ": keepalive\n\n"
                        continue
                    payload = json.dumps(data, ensure_ascii=False)
                    yield f"event: {event}\ndata: {payload}\n\n"
            finally:
                if queue in box.subscribers:
                    box.subscribers.remove(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
