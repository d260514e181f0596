from __future__ import annotations

import asyncio
import json

import httpx
import pytest
from fastapi.testclient import TestClient

from nlcmd.service.app import create_app

from conftest import GOLDEN_FRAME, GOLDEN_SENTENCE


@pytest.fixture()
def client():
    with TestClient(create_app()) as test_client:
        yield test_client


def _session(client, **body) -> str:
    response = client.post("/api/session", json=body)
    assert response.status_code == 200
    return response.json()["id"]


def test_session_create_and_command(client):
    sid = _session(client)
    response = client.post(f"/api/session/{sid}/command", json={"text": GOLDEN_SENTENCE})
    trace = response.json()
    assert trace["ok"]
    assert trace["frame"] == GOLDEN_FRAME


def test_unknown_session_is_404(client):
    assert client.post("/api/session/nope/command", json={"text": "x"}).status_code == 404
    assert client.get("/api/session/nope/state").status_code == 404


def test_state_endpoint_reflects_mutation(client):
    sid = _session(client)
    before = client.get(f"/api/session/{sid}/state").json()
    assert before["kind"] == "editor" and len(before["lines"]) == 12
    client.post(
        f"/api/session/{sid}/command",
        json={"text": "delete carriage returns in each line"},
    )
    after = client.get(f"/api/session/{sid}/state").json()
    assert len(after["lines"]) == 1


def test_selection_flow(client):
    sid = _session(client)
    trace = client.post(
        f"/api/session/{sid}/command", json={"text": 'replcae "a" with "b"'}
    ).json()
    assert trace["awaiting"] == "selection"
    rerun = client.post(
        f"/api/session/{sid}/selection", json={"surface": "replcae", "index": 1011}
    ).json()
    assert rerun["ok"]
    assert rerun["stages"][0]["stage"] == "suggestion_accepted"


def test_suit_listing_upload_download(client, tmp_path):
    listing = client.get("/api/suits").json()
    assert any(s["id"] == "shapes" for s in listing)

    blob = client.get("/api/suits/shapes").content
    roundtrip = json.loads(blob)
    assert roundtrip["meta"]["id"] == "shapes"

    custom = {
        "meta": {"id": "marks", "name": "Marks", "version": "1.0", "language_id": "en"},
        "entries": [
            {"index": 2080, "class": "Noun", "forms": ["marker"], "pos": "noun"}
        ],
        "rules": [],
        "temp_classes": {},
        "adapter_id": "editor",
    }
    response = client.post("/api/suits", content=json.dumps(custom))
    assert response.status_code == 200
    assert response.json() == {"id": "marks"}
    assert client.get("/api/suits/marks").json()["meta"]["name"] == "Marks"


def test_invalid_suit_upload_is_422(client):
    bad = {"meta": {"id": "x", "name": "x", "version": "1", "language_id": "en"},
           "entries": [], "rules": [], "temp_classes": {}, "adapter_id": "maya-real"}
    response = client.post("/api/suits", content=json.dumps(bad))
    assert response.status_code == 422
    assert response.json()["error"]["kind"] == "UnknownAdapter"


def test_session_suit_load_and_shape_command(client):
    sid = _session(client)
    response = client.post(f"/api/session/{sid}/suit", json={"suit_id": "shapes"})
    assert response.json() == {"id": "shapes", "adapter": "shapes"}
    trace = client.post(
        f"/api/session/{sid}/command",
        json={"text": "create a sphere with a 5 radius"},
    ).json()
    assert trace["ok"]
    state = client.get(f"/api/session/{sid}/state").json()
    assert state["kind"] == "scene"
    assert state["objects"][0] == {"kind": "sphere", "name": "sphere1",
                                   "params": {"radius": 5}}


def test_adapter_switch_keeps_editor_state(client):
    sid = _session(client)
    client.post(
        f"/api/session/{sid}/command",
        json={"text": "delete carriage returns in each line"},
    )
    client.post(f"/api/session/{sid}/adapter", json={"adapter": "shapes"})
    assert client.get(f"/api/session/{sid}/state").json()["kind"] == "scene"
    client.post(f"/api/session/{sid}/adapter", json={"adapter": "editor"})
    assert len(client.get(f"/api/session/{sid}/state").json()["lines"]) == 1


def test_sse_stream_delivers_trace_and_state():
    # httpx buffers ASGI responses, so the endless SSE body is read by
    # driving the ASGI app directly.
    app = create_app()

    async def scenario() -> bytes:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://engine"
        ) as client:
            sid = (await client.post("/api/session", json={})).json()["id"]

            chunks: list[bytes] = []
            got_state = asyncio.Event()

            async def receive():
                await asyncio.sleep(3600)
                return {"type": "http.disconnect"}

            async def send(message):
                if message["type"] == "http.response.body":
                    chunks.append(message.get("body", b""))
                    if b"event: state" in b"".join(chunks):
                        got_state.set()

            scope = {
                "type": "http",
                "http_version": "1.1",
                "method": "GET",
                "path": f"/api/events/{sid}",
                "raw_path": f"/api/events/{sid}".encode(),
                "query_string": b"",
                "headers": [],
                "client": ("test", 1),
                "server": ("test", 80),
                "scheme": "http",
            }
            stream_task = asyncio.create_task(app(scope, receive, send))
            await asyncio.sleep(0.1)
            await client.post(
                f"/api/session/{sid}/command",
                json={"text": "delete carriage returns in each line"},
            )
            await asyncio.wait_for(got_state.wait(), timeout=5.0)
            stream_task.cancel()
            return b"".join(chunks)

    body = asyncio.run(scenario())
    assert body.startswith(b"event: ready\n")
    assert b"event: trace\n" in body
    assert b"event: state\n" in body
    state_payload = body.split(b"event: state\ndata: ", 1)[1].split(b"\n", 1)[0]
    assert len(json.loads(state_payload)["lines"]) == 1
