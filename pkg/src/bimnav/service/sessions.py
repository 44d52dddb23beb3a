"""In-memory session runtime shared by the HTTP app and the simulator.

A ``World`` is the immutable bundle built from one building model; a
``Session`` is one user's mutable slice of it, guarded by its own lock.
The tick loop never blocks on a busy session: a session whose lock is
held (say, by a slow model call inside a query) just skips that tick.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import uuid
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import IO, Sequence

from .. import geometry
from ..agents import (
    AgentResponse,
    DialogueState,
    HttpLlmClient,
    LlmClient,
    RuleBasedLlmClient,
    SearchContext,
    UserQuery,
    route_distance_fn,
)
from ..agents import handle_query as run_query
from ..errors import FrameMismatch, SnapFailed, Unreachable
from ..geometry import Point3
from ..guide import FollowConfig, GuideMode, GuideState, tick as guide_tick
from ..index import (
    HttpEncoderClient,
    ReferenceEncoder,
    VectorStore,
    build_index,
    dump_store,
    load_store,
    manifest_digest,
)
from ..ingest import AnchorPair, BimEntity, BimModel, extract_entities, load_manifest, parse_step_subset
from ..spatial import (
    AlignmentResult,
    IDENTITY_QUAT,
    NavGrid,
    Path,
    Pose,
    RigidTransform,
    apply_transform,
    build_nav_grid,
    estimate_transform,
    plan_route,
)
from .config import ServiceConfig

LOGGER = logging.getLogger(__name__)

# event buffers keep this many entries per subscriber before dropping
EVENT_QUEUE_LIMIT = 512


def load_model(path: str | FsPath) -> BimModel:
    """Read a building model, picking the parser from the file suffix."""
    path = FsPath(path)
    data = path.read_bytes()
    if path.suffix.lower() in (".ifc", ".step", ".stp"):
        return parse_step_subset(data)
    return load_manifest(data)


@dataclass(frozen=True)
class World:
    """Everything derived from one building model, shared across sessions."""

    model: BimModel
    entities: tuple[BimEntity, ...]
    store: VectorStore
    encoder: object
    grid: NavGrid
    llm: LlmClient
    context: SearchContext
    source_digest: str


def build_world(config: ServiceConfig) -> World:
    model = load_model(config.model_path)
    entities = tuple(extract_entities(model))
    digest = manifest_digest(FsPath(config.model_path).read_bytes())

    if config.encoder_url:
        encoder = HttpEncoderClient(config.encoder_url)
    else:
        encoder = ReferenceEncoder()

    store: VectorStore | None = None
    cache = FsPath(config.cache_path) if config.cache_path else None
    if cache is not None and cache.exists():
        store = load_store(cache.read_bytes(), expected_digest=digest)
        if store is None:
            LOGGER.info("index cache at %s is stale, rebuilding", cache)
    if store is None:
        store = build_index(list(entities), encoder)
        if cache is not None:
            cache.parent.mkdir(parents=True, exist_ok=True)
            cache.write_bytes(dump_store(store, digest))

    grid = build_nav_grid(model, config.cell_size_m)
    llm: LlmClient = HttpLlmClient(config.llm_url, model=config.llm_model) if config.llm_url else RuleBasedLlmClient()
    distance_fn = route_distance_fn(grid) if config.distance_metric == "route" else None
    context = SearchContext(store=store, encoder=encoder, top_n=config.top_n, distance_fn=distance_fn)
    return World(
        model=model,
        entities=entities,
        store=store,
        encoder=encoder,
        grid=grid,
        llm=llm,
        context=context,
        source_digest=digest,
    )


@dataclass
class Session:
    """One user's state; every access goes through ``lock``."""

    id: str
    transform: RigidTransform
    rms_residual_m: float
    high_residual: bool
    follow: FollowConfig
    guide: GuideState
    dialogue: DialogueState = field(default_factory=DialogueState)
    user_pose: Pose | None = None
    current_goal: BimEntity | None = None
    goal_queue: tuple[BimEntity, ...] = ()
    route: Path | None = None
    tick: int = 0
    lock: threading.RLock = field(default_factory=threading.RLock)
    subscribers: list[queue.SimpleQueue] = field(default_factory=list)
    event_seq: int = 0
    event_log: deque = field(default_factory=lambda: deque(maxlen=EVENT_QUEUE_LIMIT))
    trajectory: IO[str] | None = None


class SessionManager:
    """Creates sessions, routes queries and advances every guide in step."""

    def __init__(self, world: World, config: ServiceConfig):
        self.world = world
        self.config = config
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._ticker: threading.Thread | None = None
        self._stop = threading.Event()

    # -- lifecycle ----------------------------------------------------------

    def create_session(
        self,
        anchors: Sequence[AnchorPair] | None = None,
        transform: RigidTransform | None = None,
        follow: FollowConfig | None = None,
    ) -> Session:
        """New session aligned via anchors, an explicit transform, or identity.

        With no arguments the model's own anchor pairs are used; a model
        without anchors yields the identity mapping (poses already in the
        building frame).
        """
        if transform is not None:
            alignment = AlignmentResult(transform=transform, rms_residual_m=0.0, high_residual=False)
        else:
            pairs = tuple(anchors) if anchors is not None else self.world.model.anchors
            if pairs:
                alignment = estimate_transform(pairs)
            else:
                alignment = AlignmentResult(
                    transform=RigidTransform.identity(), rms_residual_m=0.0, high_residual=False
                )

        session = Session(
            id=uuid.uuid4().hex[:12],
            transform=alignment.transform,
            rms_residual_m=alignment.rms_residual_m,
            high_residual=alignment.high_residual,
            follow=follow or FollowConfig(),
            guide=GuideState.idle((0.0, 0.0, 0.0)),
        )
        if self.config.log_dir:
            log_dir = FsPath(self.config.log_dir)
            log_dir.mkdir(parents=True, exist_ok=True)
            session.trajectory = (log_dir / f"session-{session.id}.jsonl").open("w", encoding="utf-8")
        with self._lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self.sessions.get(session_id)

    def close(self) -> None:
        self.stop_ticker()
        with self._lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            with session.lock:
                if session.trajectory is not None:
                    session.trajectory.close()
                    session.trajectory = None

    # -- user input ----------------------------------------------------------

    def update_pose(
        self,
        session: Session,
        position: Point3,
        orientation: tuple[float, float, float, float] = IDENTITY_QUAT,
        frame: str = "vps",
    ) -> Pose:
        """Store the user's pose, mapping device-frame input into the building."""
        if frame not in ("vps", "bim"):
            raise FrameMismatch(f"unknown frame {frame!r}")
        pose = Pose(position=position, orientation=orientation, frame=frame)  # type: ignore[arg-type]
        if frame == "vps":
            pose = apply_transform(session.transform, pose)
        with session.lock:
            session.user_pose = pose
        return pose

    def handle_query(self, session: Session, text: str) -> AgentResponse:
        """Run the agent pipeline and set up guidance for resolved goals."""
        with session.lock:
            user_position = session.user_pose.position if session.user_pose else None
            query = UserQuery(
                text=text,
                user_position=user_position,
                session_id=session.id,
                timestamp=session.tick,
            )
            response, session.dialogue = run_query(
                query, session.dialogue, self.world.context, self.world.llm
            )
            if response.needs_clarification:
                self._emit(session, "clarification", question=response.text)
                return response

            goals = tuple(g.entity for g in response.goals if g.entity is not None)
            if response.category != "navigation" or not goals:
                return response

            if user_position is None:
                return AgentResponse(
                    text="I do not know where you are yet. Send me your position first.",
                    category="navigation",
                    goals=response.goals,
                    error_code="no_user_pose",
                )

            try:
                self._start_leg(session, goals[0], goals[1:], start=user_position)
            except (Unreachable, SnapFailed) as exc:
                LOGGER.warning("route to %s failed: %s", goals[0].id, exc)
                self._emit(session, "error", code=exc.code, goal_id=goals[0].id)
                return AgentResponse(
                    text=(
                        f"I'm sorry, I cannot find a walkable route to {goals[0].name} "
                        "from where we are."
                    ),
                    category="navigation",
                    goals=response.goals,
                    error_code=exc.code,
                )
            return response

    # -- guidance ------------------------------------------------------------

    def _start_leg(
        self,
        session: Session,
        goal: BimEntity,
        rest: tuple[BimEntity, ...],
        start: Point3 | None = None,
    ) -> None:
        """Plan and activate the route for the next goal. Caller holds the lock."""
        if start is None:
            start = session.guide.position
        route = plan_route(self.world.grid, start, goal.position)
        session.route = route
        session.current_goal = goal
        session.goal_queue = rest
        session.guide = GuideState.idle(route.waypoints[0]).with_route(route, goal=route.goal)
        self._emit(
            session,
            "route",
            goal_id=goal.id,
            goal_name=goal.name,
            length_m=round(route.length_m, 3),
            waypoints=len(route.waypoints),
        )

    def tick_session(self, session: Session, dt: float) -> None:
        """Advance one session's guide by dt. Caller holds the lock."""
        session.tick += 1
        user = session.user_pose
        if user is not None and session.guide.mode is not GuideMode.IDLE:
            before = session.guide.mode
            session.guide = guide_tick(session.guide, user.position, dt, session.follow, self.world.grid)
            after = session.guide.mode
            if after is not before:
                self._emit(session, "mode_change", previous=before.value, mode=after.value)
                if after is GuideMode.PRESENTING and session.current_goal is not None:
                    self._emit(session, "goal_reached", goal_id=session.current_goal.id)
            if (
                after is GuideMode.PRESENTING
                and session.goal_queue
                and geometry.planar_distance(user.position, session.guide.position)
                <= session.follow.resume_distance_m
            ):
                # user caught up at this stop; move on to the next goal
                nxt, rest = session.goal_queue[0], session.goal_queue[1:]
                try:
                    self._start_leg(session, nxt, rest)
                except (Unreachable, SnapFailed) as exc:
                    LOGGER.warning("dropping queued goal %s: %s", nxt.id, exc)
                    self._emit(session, "error", code=exc.code, goal_id=nxt.id)
                    session.goal_queue = rest
        self._log_tick(session)

    def tick_all(self, dt: float) -> None:
        with self._lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            if not session.lock.acquire(blocking=False):
                continue  # busy with a query; skip, do not stall the loop
            try:
                self.tick_session(session, dt)
            finally:
                session.lock.release()

    def start_ticker(self) -> None:
        if self._ticker is not None:
            return
        self._stop.clear()
        dt = self.config.tick_dt

        def loop() -> None:
            while not self._stop.wait(timeout=dt):
                self.tick_all(dt)

        self._ticker = threading.Thread(target=loop, name="bimnav-ticker", daemon=True)
        self._ticker.start()

    def stop_ticker(self) -> None:
        self._stop.set()
        if self._ticker is not None:
            self._ticker.join(timeout=2.0)
            self._ticker = None

    # -- observation -----------------------------------------------------------

    def subscribe(self, session: Session) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        with session.lock:
            session.subscribers.append(q)
        return q

    def unsubscribe(self, session: Session, q: queue.SimpleQueue) -> None:
        with session.lock:
            if q in session.subscribers:
                session.subscribers.remove(q)

    def _emit(self, session: Session, event_type: str, **data: object) -> None:
        session.event_seq += 1
        event = {"seq": session.event_seq, "tick": session.tick, "type": event_type, **data}
        session.event_log.append(event)
        for q in session.subscribers:
            if q.qsize() < EVENT_QUEUE_LIMIT:
                q.put(event)

    def events_since(self, session: Session, since: int) -> list[dict]:
        """Buffered events with seq greater than ``since``, oldest first."""
        with session.lock:
            return [e for e in session.event_log if e["seq"] > since]

    def _log_tick(self, session: Session) -> None:
        if session.trajectory is None:
            return
        user = session.user_pose
        record = {
            "tick": session.tick,
            "mode": session.guide.mode.value,
            "user": list(user.position) if user else None,
            "guide": list(session.guide.position),
            "goal_id": session.current_goal.id if session.current_goal else None,
        }
        session.trajectory.write(json.dumps(record) + "\n")
        session.trajectory.flush()

    def snapshot(self, session: Session) -> dict:
        """JSON-ready view of one session for the state endpoint."""
        with session.lock:
            user = session.user_pose
            guide = session.guide
            route = session.route
            return {
                "session_id": session.id,
                "tick": session.tick,
                "transform": {
                    "rotation": list(session.transform.rotation),
                    "translation": list(session.transform.translation),
                    "rms_residual_m": session.rms_residual_m,
                    "high_residual": session.high_residual,
                },
                "user": (
                    {
                        "position": list(user.position),
                        "orientation": list(user.orientation),
                    }
                    if user
                    else None
                ),
                "guide": {
                    "mode": guide.mode.value,
                    "position": list(guide.position),
                    "heading": list(guide.heading),
                    "path_progress_m": guide.path_progress_m,
                },
                "current_goal": session.current_goal.id if session.current_goal else None,
                "goal_queue": [e.id for e in session.goal_queue],
                "route": (
                    {
                        "waypoints": [list(w) for w in route.waypoints],
                        "length_m": route.length_m,
                    }
                    if route
                    else None
                ),
            }
