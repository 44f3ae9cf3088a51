"""Command-line interface: explore a family, verify it, or serve the API."""

from __future__ import annotations

import json
import os
import sys

import click

from .algebra import Strategy
from .io_formats import (
    attribute_display,
    export_neighborhood_dot,
    parse_rcf,
)
from .model import InputError
from .oracle import verify_one_step
from .service import make_session, run_query


def _load_rcf(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse_rcf(handle.read())


def _parse_strategy(spec: str) -> Strategy:
    entries = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        relation, sep, op = chunk.partition(":")
        if not sep:
            raise InputError(
                f"bad strategy entry {chunk!r}; expected '<relation>:<operator>'"
            )
        entries.append((relation.strip(), op.strip()))
    return Strategy.of(*entries)


def _parse_names(spec: str) -> list[str]:
    return [part.strip() for part in spec.split(",") if part.strip()]


def _pick_context(rcf, context_id):
    if context_id:
        rcf.context(context_id)
        return context_id
    if len(rcf.contexts) == 1:
        return next(iter(rcf.contexts))
    raise InputError(
        f"--context is required; available: {sorted(rcf.contexts)}"
    )


def _print_table(session, payload):
    focus = payload["focus"]
    click.echo(f"Context: {payload['context']}")
    if payload["warning"]:
        click.echo("Warning: the query selects no objects (bottom concept).")
    click.echo(f"Focus: {focus['name']}")
    click.echo("  extent: {" + ", ".join(focus["extent"]) + "}")
    intent = ", ".join(
        e["name"] if e["kind"] == "intrinsic" else e["display"]
        for e in focus["intent"]
    )
    click.echo(f"  intent: {intent}")
    for side, title in (("upper", "Upper covers"), ("lower", "Lower covers")):
        covers = payload[side]
        click.echo(f"{title} ({len(covers)}):")
        for cover in covers:
            click.echo(
                f"  {cover['name']}  extent={{{', '.join(cover['extent'])}}}"
            )
    click.echo(f"Relational covers ({len(payload['relational'])}):")
    for cover in payload["relational"]:
        concept = cover["concept"]
        click.echo(
            f"  {cover['op']} {cover['relation']} -> {concept['name']}  "
            f"extent={{{', '.join(concept['extent'])}}}"
        )


@click.group()
@click.version_option(package_name="rcanav")
def main():
    """On-demand navigation in relational concept structures."""


@main.command()
@click.option("--rcf", "rcf_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--context", "context_id", default=None, help="Context to explore.")
@click.option("--strategy", "strategy_spec", default="", help="Comma-separated <relation>:<operator> pairs.")
@click.option("--query", "query_spec", default="", help="Comma-separated attribute names.")
@click.option("--format", "fmt", type=click.Choice(["table", "json", "dot"]), default="table")
def explore(rcf_path, context_id, strategy_spec, query_spec, fmt):
    """Load a family, focus on a queried concept, print its neighbourhood."""
    try:
        rcf = _load_rcf(rcf_path)
        context_id = _pick_context(rcf, context_id)
        strategy = _parse_strategy(strategy_spec)
        session = make_session(rcf, context_id, strategy)
        payload = run_query(session, _parse_names(query_spec))
    except InputError as exc:
        raise click.ClickException(str(exc)) from None
    if fmt == "json":
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2))
    elif fmt == "dot":
        click.echo(
            export_neighborhood_dot(session.neighborhood, session.registry),
            nl=False,
        )
    else:
        _print_table(session, payload)


@main.command()
@click.option("--rcf", "rcf_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--strategy", "strategy_spec", default="", help="Comma-separated <relation>:<operator> pairs.")
@click.option("--context", "context_ids", multiple=True, help="Restrict to these contexts.")
def verify(rcf_path, strategy_spec, context_ids):
    """Check the focused engine against exhaustive lattices, every concept."""
    try:
        rcf = _load_rcf(rcf_path)
        strategy = _parse_strategy(strategy_spec)
        strategy.validate(rcf)
    except InputError as exc:
        raise click.ClickException(str(exc)) from None
    targets = list(context_ids) or [
        ctx_id
        for ctx_id in sorted(rcf.contexts)
        if strategy.entries_for(rcf, ctx_id)
    ]
    if not targets:
        targets = sorted(rcf.contexts)
    failed = False
    for ctx_id in targets:
        checked, issues = verify_one_step(rcf, strategy, ctx_id)
        status = "OK" if not issues else "FAILED"
        click.echo(f"{ctx_id}: {checked} concepts checked ... {status}")
        for issue in issues:
            failed = True
            click.echo(f"  {issue}")
    if failed:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Defaults to $PORT or 8000.")
def serve(host, port):
    """Run the exploration HTTP service."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("PORT", "8000"))
    log_level = os.environ.get("LOG_LEVEL", "info").lower()
    uvicorn.run(create_app(), host=host, port=port, log_level=log_level)


if __name__ == "__main__":
    main()
