"""Command-line front end.

Every subcommand except ``serve`` is a thin client over the HTTP API:
either a remote server (``--server``) or an in-process app, so the CLI and
the service are guaranteed to agree on behavior.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .config import default_config
from .session import EngineRuntime


def _local_client(
    lexicons: tuple[str, ...], store: str | None, suggestions: int
) -> httpx.Client:
    import warnings

    with warnings.catch_warnings():
        # starlette's sync client wrapper warns about its own httpx usage;
        # irrelevant to callers of this CLI.
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    runtime = EngineRuntime(
        config=default_config(list(lexicons)), suggestion_count=suggestions
    )
    app = create_app(runtime, store_path=store)
    return TestClient(app)


def _make_client(
    server: str | None, lexicons: tuple[str, ...], store: str | None, suggestions: int
) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=30.0)
    return _local_client(lexicons, store, suggestions)


def _open_session(client: httpx.Client, adapter: str, language: str) -> str:
    response = client.post(
        "/api/session", json={"adapter": adapter, "language": language}
    )
    response.raise_for_status()
    return response.json()["id"]


def _upload_and_load_suit(client: httpx.Client, session_id: str, path: str) -> dict:
    blob = Path(path).read_bytes()
    response = client.post("/api/suits", content=blob)
    if response.status_code >= 400:
        raise click.ClickException(f"suit upload failed: {response.text}")
    suit_id = response.json()["id"]
    response = client.post(
        f"/api/session/{session_id}/suit", json={"suit_id": suit_id}
    )
    if response.status_code >= 400:
        raise click.ClickException(f"suit load failed: {response.text}")
    return response.json()


def _compact(trace: dict) -> str:
    if trace.get("awaiting") == "selection":
        return "awaiting suggestion selection (reply with a number, 0 to reject)"
    if trace.get("awaiting") == "rephrase":
        return "please rephrase the command"
    result = trace.get("result")
    if trace.get("ok") and result:
        return f"ok  {result['handler']}  affected={result['affected']}"
    for stage in reversed(trace.get("stages", [])):
        error = stage.get("error") or (stage.get("result") or {}).get("error")
        if error:
            return f"error[{error['kind']}] {error['detail']}"
    return "error"


def _suggestions_of(trace: dict) -> list[tuple[str, int, str, float]]:
    out = []
    for stage in trace.get("stages", []):
        if stage["stage"] == "learner_suggestions":
            for surface, items in stage["suggestions"].items():
                for item in items:
                    out.append((surface, item["index"], item["form"], item["score"]))
    return out


_shared_options = [
    click.option("--server", default=None, help="Base URL of a running service."),
    click.option("--lexicon", "lexicons", multiple=True, type=click.Path(exists=True),
                 help="Extra lexicon file (may repeat)."),
    click.option("--suit", "suits", multiple=True, type=click.Path(exists=True),
                 help="Suit file to load into the session (may repeat)."),
    click.option("--adapter", default="editor", show_default=True),
    click.option("--language", default="en", show_default=True),
    click.option("--store", default=None, type=click.Path(),
                 help="Learner store file (per-profile persistence)."),
    click.option("--suggestions", default=5, show_default=True,
                 help="How many ranked suggestions the learner offers."),
]


def shared_options(fn):
    for option in reversed(_shared_options):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(package_name="nlcmd")
def main() -> None:
    """Natural-language command engine."""


@main.command()
@shared_options
@click.option("--trace/--no-trace", "show_trace", default=False,
              help="Print the full trace after each command.")
def repl(server, lexicons, suits, adapter, language, store, suggestions,
         show_trace) -> None:
    """Interactive command loop."""
    client = _make_client(server, lexicons, store, suggestions)
    session_id = _open_session(client, adapter, language)
    for path in suits:
        info = _upload_and_load_suit(client, session_id, path)
        click.echo(f"loaded suit {info['id']} (adapter {info['adapter']})")
    click.echo("nlcmd repl — :quit to exit, :trace on|off, :adapter ID, :load-suit PATH")
    pending = False
    while True:
        try:
            line = input("> ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            break
        if not line:
            continue
        if line == ":quit":
            break
        if line.startswith(":trace"):
            show_trace = line.endswith("on")
            click.echo(f"trace {'on' if show_trace else 'off'}")
            continue
        if line.startswith(":adapter"):
            parts = line.split()
            if len(parts) != 2:
                click.echo("usage: :adapter ID")
                continue
            response = client.post(
                f"/api/session/{session_id}/adapter", json={"adapter": parts[1]}
            )
            if response.status_code >= 400:
                click.echo(f"error: {response.text}")
            else:
                click.echo(f"adapter {response.json()['adapter']}")
            continue
        if line.startswith(":load-suit"):
            parts = line.split(None, 1)
            if len(parts) != 2:
                click.echo("usage: :load-suit PATH")
                continue
            info = _upload_and_load_suit(client, session_id, parts[1])
            click.echo(f"loaded suit {info['id']} (adapter {info['adapter']})")
            continue
        if pending and line.isdigit():
            choice = int(line)
            if choice == 0:
                trace = client.post(
                    f"/api/session/{session_id}/selection",
                    json={"surface": "", "index": -1},
                ).json()
            else:
                options = _suggestions_of(last_trace)
                if choice > len(options):
                    click.echo("no such suggestion")
                    continue
                surface, index, _, _ = options[choice - 1]
                trace = client.post(
                    f"/api/session/{session_id}/selection",
                    json={"surface": surface, "index": index},
                ).json()
        else:
            trace = client.post(
                f"/api/session/{session_id}/command", json={"text": line}
            ).json()
        last_trace = trace
        pending = trace.get("awaiting") == "selection"
        if pending:
            for i, (surface, index, form, score) in enumerate(
                _suggestions_of(trace), start=1
            ):
                click.echo(f"  {i}) {surface!r} -> {form} ({score:.3f})")
        click.echo(_compact(trace))
        if show_trace:
            click.echo(json.dumps(trace, ensure_ascii=False, indent=2))


@main.command()
@shared_options
@click.option("--json", "as_json", is_flag=True, help="Print the full trace as JSON.")
@click.argument("command")
def run(server, lexicons, suits, adapter, language, store, suggestions,
        as_json, command) -> None:
    """Run one command and print the outcome."""
    client = _make_client(server, lexicons, store, suggestions)
    session_id = _open_session(client, adapter, language)
    for path in suits:
        _upload_and_load_suit(client, session_id, path)
    trace = client.post(
        f"/api/session/{session_id}/command", json={"text": command}
    ).json()
    if as_json:
        click.echo(json.dumps(trace, ensure_ascii=False))
    else:
        click.echo(_compact(trace))
    sys.exit(0 if trace.get("ok") else 1)


@main.command()
@shared_options
@click.option("--json", "as_json", is_flag=True, default=True,
              help="Print the full trace as JSON (default).")
@click.argument("command")
def trace(server, lexicons, suits, adapter, language, store, suggestions,
          as_json, command) -> None:
    """Run one command and print its pipeline trace."""
    client = _make_client(server, lexicons, store, suggestions)
    session_id = _open_session(client, adapter, language)
    for path in suits:
        _upload_and_load_suit(client, session_id, path)
    result = client.post(
        f"/api/session/{session_id}/command", json={"text": command}
    ).json()
    click.echo(json.dumps(result, ensure_ascii=False, indent=2))


@main.command()
@click.option("--port", default=8756, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None, type=click.Path(exists=True),
              help="Directory with the built web UI.")
@click.option("--lexicon", "lexicons", multiple=True, type=click.Path(exists=True))
@click.option("--store", default=None, type=click.Path())
@click.option("--suggestions", default=5, show_default=True)
def serve(port, host, static_dir, lexicons, store, suggestions) -> None:
    """Start the HTTP service (and UI, when --static is given)."""
    import uvicorn

    from .service.app import create_app

    runtime = EngineRuntime(
        config=default_config(list(lexicons)), suggestion_count=suggestions
    )
    app = create_app(runtime, static_dir=static_dir, store_path=store)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
