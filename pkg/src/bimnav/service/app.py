"""HTTP face of the guide: sessions, poses, queries, state and events."""

from __future__ import annotations

import json
import logging
import queue
from contextlib import asynccontextmanager
from typing import Iterator, Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from ..errors import (
    BimnavError,
    DegenerateAnchors,
    EmptyText,
    EncoderMismatch,
    FrameMismatch,
    LlmUnavailable,
    NoCandidates,
    SchemaViolation,
    SnapFailed,
    UnparseableLlmOutput,
    Unreachable,
)
from ..guide import FollowConfig
from ..ingest import AnchorPair
from ..spatial import RigidTransform
from .config import ServiceConfig
from .sessions import Session, SessionManager, World, build_world

LOGGER = logging.getLogger(__name__)

_STATUS_BY_ERROR: dict[type[BimnavError], int] = {
    DegenerateAnchors: 422,
    FrameMismatch: 422,
    SchemaViolation: 422,
    EmptyText: 422,
    EncoderMismatch: 502,
    LlmUnavailable: 503,
    UnparseableLlmOutput: 502,
    Unreachable: 409,
    SnapFailed: 409,
    NoCandidates: 404,
}


class AnchorBody(BaseModel):
    vps: tuple[float, float, float]
    bim: tuple[float, float, float]


class TransformBody(BaseModel):
    rotation: tuple[float, float, float, float]
    translation: tuple[float, float, float]


class FollowBody(BaseModel):
    walk_speed_mps: float | None = None
    wait_distance_m: float | None = None
    resume_distance_m: float | None = None
    sidestep_trigger_m: float | None = None
    sidestep_radius_m: float | None = None
    sidestep_candidates: int | None = None
    ramp_duration_s: float | None = None


class CreateSessionBody(BaseModel):
    anchors: list[AnchorBody] | None = None
    transform: TransformBody | None = None
    follow: FollowBody | None = None


class PoseBody(BaseModel):
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)
    frame: Literal["vps", "bim"] = "vps"


class QueryBody(BaseModel):
    text: str = Field(min_length=1, max_length=2000)


def create_app(
    config: ServiceConfig,
    world: World | None = None,
    auto_tick: bool = True,
) -> FastAPI:
    """Build the application; pass a prebuilt world to skip re-ingesting."""
    world = world or build_world(config)
    manager = SessionManager(world, config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if auto_tick:
            manager.start_ticker()
        yield
        manager.close()

    app = FastAPI(title="bimnav", lifespan=lifespan)
    app.state.world = world
    app.state.manager = manager

    @app.exception_handler(BimnavError)
    async def bimnav_error_handler(request: Request, exc: BimnavError) -> JSONResponse:
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        headers = {}
        if isinstance(exc, LlmUnavailable):
            headers["Retry-After"] = str(exc.retry_after_s)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
            headers=headers,
        )

    @app.exception_handler(Exception)
    async def unexpected_error_handler(request: Request, exc: Exception) -> JSONResponse:
        LOGGER.exception("unhandled error on %s", request.url.path)
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal_error", "message": "unexpected failure"}},
        )

    def require_session(session_id: str) -> Session:
        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody | None = None) -> dict:
        body = body or CreateSessionBody()
        anchors = None
        if body.anchors is not None:
            anchors = [AnchorPair(vps=a.vps, bim=a.bim) for a in body.anchors]
        transform = None
        if body.transform is not None:
            transform = RigidTransform(
                rotation=body.transform.rotation, translation=body.transform.translation
            )
        follow = None
        if body.follow is not None:
            overrides = {k: v for k, v in body.follow.model_dump().items() if v is not None}
            follow = FollowConfig(**overrides)
        session = manager.create_session(anchors=anchors, transform=transform, follow=follow)
        return manager.snapshot(session)

    @app.post("/sessions/{session_id}/pose")
    def update_pose(session_id: str, body: PoseBody) -> dict:
        session = require_session(session_id)
        manager.update_pose(session, body.position, body.orientation, body.frame)
        return manager.snapshot(session)

    @app.post("/sessions/{session_id}/query")
    def post_query(session_id: str, body: QueryBody) -> dict:
        session = require_session(session_id)
        response = manager.handle_query(session, body.text)
        return {
            "response": {
                "text": response.text,
                "category": response.category,
                "needs_clarification": response.needs_clarification,
                "error_code": response.error_code,
                "goals": [
                    {
                        "id": g.entity.id if g.entity else None,
                        "name": g.entity.name if g.entity else None,
                        "similarity": g.similarity,
                        "distance_m": g.distance_m,
                        "candidate_ids": list(g.candidate_ids),
                    }
                    for g in response.goals
                ],
            },
            "state": manager.snapshot(session),
        }

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        return manager.snapshot(require_session(session_id))

    @app.get("/sessions/{session_id}/events")
    def get_events(
        session_id: str, since: int = 0, limit: int | None = None
    ) -> StreamingResponse:
        """Server-sent events; ``since`` replays the buffer, ``limit`` bounds the stream."""
        session = require_session(session_id)

        def frame(event: dict) -> str:
            return f"id: {event['seq']}\nevent: {event['type']}\ndata: {json.dumps(event)}\n\n"

        def stream() -> Iterator[str]:
            subscription = manager.subscribe(session)
            try:
                yield "retry: 1000\n\n"
                sent = 0
                last_seq = since
                for event in manager.events_since(session, since):
                    yield frame(event)
                    last_seq = event["seq"]
                    sent += 1
                    if limit is not None and sent >= limit:
                        return
                while True:
                    try:
                        event = subscription.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if event["seq"] <= last_seq:
                        continue  # already replayed from the buffer
                    yield frame(event)
                    sent += 1
                    if limit is not None and sent >= limit:
                        return
            finally:
                manager.unsubscribe(session, subscription)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/entities")
    def get_entities() -> dict:
        return {
            "building": world.model.building,
            "count": len(world.entities),
            "entities": [
                {
                    "id": e.id,
                    "class": e.ifc_class.value,
                    "name": e.name,
                    "description": e.description,
                    "position": list(e.position),
                    "footprint": (
                        {"min": list(e.footprint.min), "max": list(e.footprint.max)}
                        if e.footprint
                        else None
                    ),
                    "attributes": dict(e.attributes),
                }
                for e in world.entities
            ],
        }

    @app.get("/grid")
    def get_grid() -> dict:
        grid = world.grid
        rows = [
            "".join("." if grid.cells[ix, iz] else "#" for ix in range(grid.width))
            for iz in range(grid.depth)
        ]
        return {
            "origin": list(grid.origin),
            "cell_size_m": grid.cell_size,
            "width": grid.width,
            "depth": grid.depth,
            "rows": rows,
        }

    return app
