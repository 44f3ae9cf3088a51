"""Session-oriented exploration API and the HTTP service wrapping it.

A session owns a private snapshot of a loaded family (growth in one session
never affects another), a strategy, a name registry and a replayable step
log. The same session layer backs both the HTTP endpoints and the CLI, so
the two cannot diverge.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .algebra import Strategy
from .io_formats import (
    ConceptRegistry,
    ParseError,
    neighborhood_payload,
    parse_rcf_json,
    serialize_rcf_json,
)
from .model import (
    Concept,
    InputError,
    Intrinsic,
    InvariantError,
    NotClosedError,
    RelationalAttribute,
    RelationalContextFamily,
    UnknownNameError,
)
from .neighborhood import Neighborhood, concept_from_query, rca_step

__all__ = [
    "StaleTargetError",
    "Session",
    "make_session",
    "run_query",
    "run_step",
    "replay_log",
    "create_app",
    "app",
]


class StaleTargetError(InputError):
    """A step target is not part of the current neighbourhood; re-query."""


@dataclass
class Session:
    """One exploration in progress: snapshot, strategy, focus and log."""

    id: str
    rcf: RelationalContextFamily
    context_id: str
    strategy: Strategy
    registry: ConceptRegistry = field(default_factory=ConceptRegistry)
    focus: Optional[Concept] = None
    neighborhood: Optional[Neighborhood] = None
    log: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def make_session(
    rcf: RelationalContextFamily,
    context_id: str,
    strategy: Strategy,
    session_id: str = "local",
) -> Session:
    rcf.context(context_id)
    strategy.validate(rcf)
    return Session(session_id, rcf, context_id, strategy)


def _register_grown(session: Session) -> None:
    # Columns materialised by growth get their target concepts named first,
    # in canonical column order, before any response rendering.
    for _, ctx in sorted(session.rcf.contexts.items()):
        for attr in ctx.attributes:
            if isinstance(attr, RelationalAttribute):
                session.registry.name(attr.target, attr.target_extent)


def _respond(session: Session, neighborhood: Neighborhood, warning: bool) -> dict:
    _register_grown(session)
    return neighborhood_payload(neighborhood, session.registry, warning=warning)


def run_query(session: Session, attribute_names: list[str]) -> dict:
    """Focus on the concept selected by intrinsic attributes and step once."""
    with session.lock:
        ctx = session.rcf.context(session.context_id)
        known = set(ctx.intrinsic_names)
        missing = sorted(set(attribute_names) - known)
        if missing:
            raise UnknownNameError(
                f"unknown attribute(s) {missing} in context {session.context_id!r}"
            )
        attrs = [Intrinsic(name) for name in attribute_names]
        focus = concept_from_query(session.rcf, session.context_id, attrs)
        warning = not focus.extent
        grown, neighborhood = rca_step(session.rcf, session.strategy, focus)
        session.rcf = grown
        session.focus = neighborhood.focus
        session.neighborhood = neighborhood
        payload = _respond(session, neighborhood, warning)
        session.log.append(
            {
                "action": "query",
                "context": session.context_id,
                "attributes": sorted(attribute_names),
                "focus_extent": sorted(neighborhood.focus.extent),
            }
        )
        return payload


def run_step(session: Session, direction: str, target: str) -> dict:
    """Move to a named cover of the current neighbourhood and step again."""
    with session.lock:
        if session.neighborhood is None:
            raise StaleTargetError("no focus yet; issue a query first")
        if direction not in ("up", "down", "relational"):
            raise InputError(f"unknown step direction {direction!r}")
        neighborhood = session.neighborhood

        next_focus = None
        if direction in ("up", "down"):
            candidates = (
                neighborhood.upper if direction == "up" else neighborhood.lower
            )
            for concept in candidates:
                if session.registry.name(concept.home, concept.extent) == target:
                    next_focus = Concept(concept.home, concept.extent)
                    break
        else:
            for cover in neighborhood.relational:
                name = session.registry.name(
                    cover.concept.home, cover.concept.extent
                )
                if name == target:
                    next_focus = Concept(cover.concept.home, cover.concept.extent)
                    break
        if next_focus is None:
            raise StaleTargetError(
                f"{target!r} is not a {direction} cover of the current focus; "
                "re-issue the query"
            )

        try:
            grown, new_neighborhood = rca_step(
                session.rcf, session.strategy, next_focus
            )
        except NotClosedError as exc:
            # growth between steps can refine the snapshot past a cover that
            # was derived from older attribute generations
            raise StaleTargetError(
                f"{target!r} no longer denotes a concept of the grown "
                "snapshot; re-issue the query"
            ) from exc
        session.rcf = grown
        session.context_id = next_focus.home
        session.focus = new_neighborhood.focus
        session.neighborhood = new_neighborhood
        payload = _respond(session, new_neighborhood, warning=False)
        session.log.append(
            {
                "action": "step",
                "direction": direction,
                "target": target,
                "context": session.context_id,
                "focus_extent": sorted(new_neighborhood.focus.extent),
            }
        )
        return payload


def replay_log(
    rcf: RelationalContextFamily,
    context_id: str,
    strategy: Strategy,
    entries: list[dict],
) -> list[dict]:
    """Re-run a step log against the original family; returns the payloads."""
    session = make_session(rcf, context_id, strategy, session_id="replay")
    payloads = []
    for entry in entries:
        if entry["action"] == "query":
            payloads.append(run_query(session, list(entry["attributes"])))
        else:
            payloads.append(run_step(session, entry["direction"], entry["target"]))
    return payloads


# ---------------------------------------------------------------------------
# HTTP service


def _strategy_from_body(entries) -> Strategy:
    return Strategy.of(*((e.relation, e.op) for e in entries))


class StrategyEntry(BaseModel):
    relation: str
    op: str = "∃"


class SessionBody(BaseModel):
    rcf_id: str
    context: str
    strategy: list[StrategyEntry] = Field(default_factory=list)


class QueryBody(BaseModel):
    attributes: list[str] = Field(default_factory=list)


class StepBody(BaseModel):
    direction: str
    target: str


def create_app() -> FastAPI:
    app = FastAPI(title="rcanav exploration service", version="1.0")
    app.state.rcfs = {}
    app.state.sessions = {}

    def error(status: int, code: str, message: str, **extra):
        return JSONResponse(
            status_code=status,
            content={"error": {"code": code, "message": message, **extra}},
        )

    @app.exception_handler(ParseError)
    async def _parse_error(_req: Request, exc: ParseError):
        return JSONResponse(status_code=400, content={"error": exc.to_payload()})

    @app.exception_handler(StaleTargetError)
    async def _stale(_req: Request, exc: StaleTargetError):
        return error(409, "stale-target", str(exc))

    @app.exception_handler(InvariantError)
    async def _degraded(_req: Request, exc: InvariantError):
        # long multi-step sessions over relation cycles can outgrow the
        # step-wise attribute representation; exploration restarts cleanly
        # in a fresh session
        return error(
            409,
            "snapshot-degraded",
            f"{exc}; create a fresh session to continue exploring",
        )

    @app.exception_handler(UnknownNameError)
    async def _unknown(_req: Request, exc: UnknownNameError):
        return error(400, "unknown-name", str(exc))

    @app.exception_handler(InputError)
    async def _invalid(_req: Request, exc: InputError):
        return error(400, "invalid-input", str(exc))

    def get_session(session_id: str) -> Session:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise LookupError(session_id)
        return session

    @app.exception_handler(LookupError)
    async def _missing(_req: Request, exc: LookupError):
        return error(404, "not-found", f"unknown id {exc.args[0]!r}")

    @app.post("/v1/rcf")
    async def load_rcf(request: Request):
        body = await request.body()
        rcf = parse_rcf_json(body.decode("utf-8"))
        rcf_id = uuid.uuid4().hex
        app.state.rcfs[rcf_id] = rcf
        return {"rcf_id": rcf_id, "contexts": sorted(rcf.contexts)}

    @app.get("/v1/rcf/{rcf_id}/contexts")
    async def list_contexts(rcf_id: str):
        rcf = app.state.rcfs.get(rcf_id)
        if rcf is None:
            raise LookupError(rcf_id)
        return {
            "contexts": [
                {
                    "id": ctx.id,
                    "objects": list(ctx.objects),
                    "attributes": list(ctx.intrinsic_names),
                }
                for _, ctx in sorted(rcf.contexts.items())
            ],
            "relations": [
                {"name": rel.name, "source": rel.source, "target": rel.target}
                for _, rel in sorted(rcf.relations.items())
            ],
        }

    @app.post("/v1/sessions")
    async def create_session(body: SessionBody):
        rcf = app.state.rcfs.get(body.rcf_id)
        if rcf is None:
            raise LookupError(body.rcf_id)
        strategy = _strategy_from_body(body.strategy)
        session_id = uuid.uuid4().hex
        session = make_session(rcf, body.context, strategy, session_id)
        app.state.sessions[session_id] = session
        return {"session_id": session_id, "context": body.context}

    @app.post("/v1/sessions/{session_id}/query")
    async def query(session_id: str, body: QueryBody):
        return run_query(get_session(session_id), body.attributes)

    @app.post("/v1/sessions/{session_id}/step")
    async def step(session_id: str, body: StepBody):
        return run_step(get_session(session_id), body.direction, body.target)

    @app.get("/v1/sessions/{session_id}/log")
    async def get_log(session_id: str):
        session = get_session(session_id)
        return {
            "session_id": session.id,
            "context": session.context_id,
            "strategy": [
                {"relation": rel, "op": op.display}
                for rel, op in session.strategy.entries
            ],
            "entries": list(session.log),
        }

    ui_dir = os.path.abspath(
        os.path.join(os.path.dirname(__file__), "..", "..", "frontend")
    )
    if os.path.isfile(os.path.join(ui_dir, "index.html")):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


_app = None


def __getattr__(name):
    # Lazily build the module-level app so `uvicorn rcanav.service:app` works
    # without paying FastAPI start-up cost on library imports.
    if name == "app":
        global _app
        if _app is None:
            _app = create_app()
        return _app
    raise AttributeError(name)
