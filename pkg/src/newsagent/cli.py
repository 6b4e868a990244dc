"""Operator command line: serve, ingest, query, chat, snapshot, stats.

Every subcommand is a thin wrapper over the runtime. Runtime failures
exit 1 with one machine-readable JSON error line on stderr; usage
errors exit 2 (click's default).
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict

import click

from newsagent.graph import GraphStore
from newsagent.query import parse, execute
from newsagent.service.config import ServiceConfig, load_config
from newsagent.service.runtime import AgentRuntime


def _fail(kind: str, message: str):
    click.echo(json.dumps({"error": kind, "detail": message}), err=True)
    sys.exit(1)


def _runtime(config_path) -> AgentRuntime:
    try:
        config = load_config(config_path) if config_path else ServiceConfig()
        return AgentRuntime(config)
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))


def _maybe_save(runtime: AgentRuntime):
    if runtime.config.snapshot_path:
        runtime.store.snapshot_save(runtime.config.snapshot_path)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config JSON file.")
@click.pass_context
def main(ctx, config_path):
    """Conversational news search agent."""
    ctx.obj = config_path


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
def serve(config_path, host, port):
    """Run the HTTP service (blocks)."""
    import uvicorn

    from newsagent.service.app import create_app

    runtime = _runtime(config_path)
    if host:
        runtime.config.host = host
    if port:
        runtime.config.port = port
    uvicorn.run(create_app(runtime), host=runtime.config.host, port=runtime.config.port)


@main.command()
@click.option("--source", "source_id", default=None, help="Configured source id.")
@click.option("--file", "file_path", type=click.Path(), default=None, help="Feed file to ingest.")
@click.pass_obj
def ingest(config_path, source_id, file_path):
    """One-shot feed ingestion; prints the report as JSON."""
    if (source_id is None) == (file_path is None):
        raise click.UsageError("pass exactly one of --source or --file")
    runtime = _runtime(config_path)
    try:
        if file_path is not None:
            report = runtime.ingest_file(file_path)
        else:
            report = runtime.trigger_ingest(source_id)
    except FileNotFoundError as exc:
        _fail("IoError", str(exc))
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))
    _maybe_save(runtime)
    click.echo(json.dumps(report.as_dict()))


@main.command()
@click.option("--template", "template_name", default=None)
@click.option("--param", "params", multiple=True, help="k=v pairs for the template.")
@click.option("--raw", "raw_query", default=None, help="Query text to run directly.")
@click.pass_obj
def query(config_path, template_name, params, raw_query):
    """Run a template or raw query; prints result rows as JSON lines."""
    if (template_name is None) == (raw_query is None):
        raise click.UsageError("pass exactly one of --template or --raw")
    runtime = _runtime(config_path)
    values = {}
    for pair in params:
        if "=" not in pair:
            raise click.UsageError(f"--param needs k=v, got {pair!r}")
        key, _, value = pair.partition("=")
        values[key] = int(value) if value.isdigit() else value
    try:
        if template_name is not None:
            rows = runtime.registry.run(template_name, values, runtime.store)
        else:
            rows = execute(parse(raw_query), values, runtime.store)
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))
    for row in rows:
        click.echo(
            json.dumps(
                {
                    var: {"label": snap.label, "key": snap.key, "properties": snap.properties}
                    for var, snap in row.items()
                },
                ensure_ascii=False,
            )
        )


@main.command()
@click.option("--lang", default=None, help="Session language (default from config).")
@click.pass_obj
def chat(config_path, lang):
    """Interactive REPL over the full pipeline."""
    runtime = _runtime(config_path)
    runtime.start()
    try:
        session, greeting = runtime.create_session(lang)
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))
    click.echo(f"agent> {greeting.text}")
    while True:
        try:
            line = input("you> ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            break
        if not line:
            continue
        response, intent, session = runtime.handle_utterance(session.session_id, line)
        click.echo(f"agent> {response.text}")
        for suggestion in response.suggestions:
            click.echo(f"       [{suggestion.number}] {suggestion.title}")
        if response.directives:
            click.echo(f"       (directives: {', '.join(response.directives)})")
        if intent.intent == "goodbye":
            break
    runtime.shutdown()


@main.group()
def snapshot():
    """Save or load graph snapshots."""


@snapshot.command("save")
@click.argument("path", type=click.Path())
@click.pass_obj
def snapshot_save(config_path, path):
    runtime = _runtime(config_path)
    try:
        runtime.store.snapshot_save(path)
    except OSError as exc:
        _fail("IoError", str(exc))
    click.echo(json.dumps({"saved": path}))


@snapshot.command("load")
@click.argument("path", type=click.Path())
@click.pass_obj
def snapshot_load(config_path, path):
    """Validate a snapshot and print its stats."""
    try:
        store = GraphStore.snapshot_load(path)
    except FileNotFoundError as exc:
        _fail("IoError", str(exc))
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))
    click.echo(json.dumps(store.stats()))


@main.command()
@click.pass_obj
def stats(config_path):
    """Print node and edge counts as JSON."""
    runtime = _runtime(config_path)
    click.echo(json.dumps(runtime.stats()))


if __name__ == "__main__":
    main()
