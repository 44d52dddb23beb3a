"""Headless scenario runner: scripted users against a live session.

Each case opens a fresh session (aligned through the model's anchors, so
poses travel the full device-frame round trip), sends the scripted
queries, and optionally walks a simulated user behind the guide until it
presents the goal. Expectations are declared in the scenario file and
checked here; the outcome is a JSON-ready report.
"""

from __future__ import annotations

import json
import math
import queue as queue_mod
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from ..errors import SchemaViolation
from ..geometry import Point3, planar_distance
from ..guide import GuideMode
from .config import ServiceConfig
from .sessions import Session, SessionManager, World, build_world

_DEFAULTS = {
    "user_start": (2.0, 0.0, 10.0),
    "dt": 0.1,
    "max_ticks": 3000,
    "user_speed_mps": 1.0,
    "follow_gap_m": 1.0,
}


@dataclass
class CaseResult:
    name: str
    passed: bool
    failures: list[str]
    ticks: int
    category: str | None
    goal_ids: list[str]
    response_text: str
    error_code: str | None
    final_mode: str
    goals_reached: list[str]
    clarification_events: int = 0
    presenting_distance_m: float | None = None
    heading_error_deg: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failures": self.failures,
            "ticks": self.ticks,
            "category": self.category,
            "goal_ids": self.goal_ids,
            "response_text": self.response_text,
            "error_code": self.error_code,
            "final_mode": self.final_mode,
            "goals_reached": self.goals_reached,
            "clarification_events": self.clarification_events,
            "presenting_distance_m": self.presenting_distance_m,
            "heading_error_deg": self.heading_error_deg,
        }


@dataclass
class SimulationReport:
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.cases)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cases if c.passed)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "passed": self.passed,
            "failed": self.failed,
            "cases": [c.to_dict() for c in self.cases],
        }


def load_scenarios(path: str | FsPath) -> dict:
    raw = json.loads(FsPath(path).read_text("utf-8"))
    if not isinstance(raw, dict) or not isinstance(raw.get("cases"), list):
        raise SchemaViolation("cases", "scenario file must hold an object with a 'cases' array")
    for index, case in enumerate(raw["cases"]):
        if not isinstance(case, dict) or "name" not in case or "query" not in case:
            raise SchemaViolation(f"cases[{index}]", "each case needs 'name' and 'query'")
    return raw


def _vps_point(session: Session, bim_point: Point3) -> Point3:
    """Map a building-frame point back into the device frame for posting."""
    return session.transform.inverse().apply_point(bim_point)


def _follow_step(
    user: Point3, guide: Point3, dt: float, speed: float, gap: float
) -> Point3:
    d = planar_distance(user, guide)
    if d <= gap:
        return user
    step = min(speed * dt, d - gap)
    ux, uy, uz = user
    return (
        ux + (guide[0] - ux) / d * step,
        uy,
        uz + (guide[2] - uz) / d * step,
    )


def _heading_error_deg(session: Session) -> float | None:
    guide = session.guide
    if session.user_pose is None or session.route is None:
        return None
    gx, _, gz = guide.position
    vecs = []
    for target in (session.user_pose.position, session.route.goal):
        dx, dz = target[0] - gx, target[2] - gz
        n = math.hypot(dx, dz)
        if n < 1e-9:
            return None
        vecs.append((dx / n, dz / n))
    bx, bz = vecs[0][0] + vecs[1][0], vecs[0][1] + vecs[1][1]
    n = math.hypot(bx, bz)
    if n < 1e-9:
        bx, bz = vecs[0]
    else:
        bx, bz = bx / n, bz / n
    hx, hz = guide.heading
    dot = max(-1.0, min(1.0, hx * bx + hz * bz))
    return math.degrees(math.acos(dot))


def _check(expect: dict, result: CaseResult) -> None:
    if "category" in expect and result.category != expect["category"]:
        result.failures.append(f"category: expected {expect['category']} got {result.category}")
    if "goal_ids" in expect and result.goal_ids != list(expect["goal_ids"]):
        result.failures.append(f"goal_ids: expected {expect['goal_ids']} got {result.goal_ids}")
    if "clarification" in expect:
        asked = result.clarification_events > 0
        if bool(expect["clarification"]) != asked:
            verdict = "question was not asked" if expect["clarification"] else "unexpected question"
            result.failures.append(f"clarification: {verdict}")
    if "final_goal_ids" in expect and result.goal_ids != list(expect["final_goal_ids"]):
        result.failures.append(
            f"final_goal_ids: expected {expect['final_goal_ids']} got {result.goal_ids}"
        )
    for needle in expect.get("response_contains", ()):
        if needle.lower() not in result.response_text.lower():
            result.failures.append(f"response_contains: {needle!r} missing")
    if "response_contains_any" in expect:
        needles = expect["response_contains_any"]
        if not any(n.lower() in result.response_text.lower() for n in needles):
            result.failures.append(f"response_contains_any: none of {needles} present")
    if "error_code" in expect and result.error_code != expect["error_code"]:
        result.failures.append(f"error_code: expected {expect['error_code']} got {result.error_code}")
    if "goals_reached" in expect and result.goals_reached != list(expect["goals_reached"]):
        result.failures.append(
            f"goals_reached: expected {expect['goals_reached']} got {result.goals_reached}"
        )
    if expect.get("reaches_presenting"):
        if result.final_mode != GuideMode.PRESENTING.value:
            result.failures.append(f"never presented: final mode {result.final_mode}")
        else:
            limit = expect.get("presenting_within_m")
            if limit is not None and (
                result.presenting_distance_m is None or result.presenting_distance_m > limit
            ):
                result.failures.append(
                    f"presenting at {result.presenting_distance_m} m, limit {limit} m"
                )
            heading_limit = expect.get("heading_within_deg")
            if heading_limit is not None and (
                result.heading_error_deg is None or result.heading_error_deg > heading_limit
            ):
                result.failures.append(
                    f"heading off bisector by {result.heading_error_deg} deg, limit {heading_limit}"
                )


def run_scenarios(
    scenarios: dict,
    config: ServiceConfig,
    world: World | None = None,
    record_path: str | FsPath | None = None,
) -> SimulationReport:
    world = world or build_world(config)
    manager = SessionManager(world, config)
    defaults = {**_DEFAULTS, **scenarios.get("defaults", {})}
    report = SimulationReport()
    recording: dict = {
        "building": world.model.building,
        "grid": _grid_payload(world),
        "entities": _entity_payload(world),
        "cases": [],
    }

    for case in scenarios["cases"]:
        result = _run_case(manager, case, defaults, recording)
        report.cases.append(result)

    manager.close()
    if record_path is not None:
        FsPath(record_path).write_text(json.dumps(recording, indent=1), encoding="utf-8")
    return report


def _grid_payload(world: World) -> dict:
    grid = world.grid
    return {
        "origin": list(grid.origin),
        "cell_size_m": grid.cell_size,
        "width": grid.width,
        "depth": grid.depth,
        "rows": [
            "".join("." if grid.cells[ix, iz] else "#" for ix in range(grid.width))
            for iz in range(grid.depth)
        ],
    }


def _entity_payload(world: World) -> list[dict]:
    return [
        {
            "id": e.id,
            "class": e.ifc_class.value,
            "name": e.name,
            "position": list(e.position),
            "footprint": (
                {"min": list(e.footprint.min), "max": list(e.footprint.max)}
                if e.footprint
                else None
            ),
        }
        for e in world.entities
    ]


def _run_case(
    manager: SessionManager, case: dict, defaults: dict, recording: dict
) -> CaseResult:
    session = manager.create_session()
    subscription = manager.subscribe(session)
    user = tuple(case.get("user_start", defaults["user_start"]))
    dt = float(case.get("dt", defaults["dt"]))
    max_ticks = int(case.get("max_ticks", defaults["max_ticks"]))
    speed = float(case.get("user_speed_mps", defaults["user_speed_mps"]))
    gap = float(case.get("follow_gap_m", defaults["follow_gap_m"]))

    manager.update_pose(session, _vps_point(session, user), frame="vps")
    response = manager.handle_query(session, case["query"])
    if "reply" in case:
        response = manager.handle_query(session, case["reply"])

    ticks: list[dict] = []
    routes: list[dict] = []
    last_route = None

    def note_route(at_tick: int) -> None:
        # replay needs the waypoints of every leg, not just the last one
        nonlocal last_route
        if session.route is not None and session.route is not last_route:
            routes.append(
                {
                    "tick": at_tick,
                    "goal_id": session.current_goal.id if session.current_goal else None,
                    "waypoints": [list(w) for w in session.route.waypoints],
                    "length_m": session.route.length_m,
                }
            )
            last_route = session.route

    tick_count = 0
    if case.get("follow") and response.error_code is None:
        with session.lock:
            note_route(0)
        while tick_count < max_ticks:
            with session.lock:
                guide_pos = session.guide.position
            user = _follow_step(user, guide_pos, dt, speed, gap)
            manager.update_pose(session, _vps_point(session, user), frame="vps")
            with session.lock:
                manager.tick_session(session, dt)
                note_route(session.tick)
                mode = session.guide.mode
                done = mode is GuideMode.PRESENTING and not session.goal_queue
                ticks.append(
                    {
                        "tick": session.tick,
                        "user": [round(v, 4) for v in user],
                        "guide": [round(v, 4) for v in session.guide.position],
                        "mode": mode.value,
                    }
                )
            tick_count += 1
            if done:
                break

    goals_reached = []
    clarification_events = 0
    while True:
        try:
            event = subscription.get_nowait()
        except queue_mod.Empty:
            break
        if event["type"] == "goal_reached":
            goals_reached.append(event["goal_id"])
        elif event["type"] == "clarification":
            clarification_events += 1
    manager.unsubscribe(session, subscription)

    with session.lock:
        final_mode = session.guide.mode.value
        presenting_distance = None
        if session.route is not None:
            presenting_distance = planar_distance(session.guide.position, session.route.goal)
        heading_error = _heading_error_deg(session)
        result = CaseResult(
            name=case["name"],
            passed=False,
            failures=[],
            ticks=tick_count,
            category=response.category,
            goal_ids=[g.entity.id for g in response.goals if g.entity is not None],
            response_text=response.text,
            error_code=response.error_code,
            final_mode=final_mode,
            goals_reached=goals_reached,
            clarification_events=clarification_events,
            presenting_distance_m=presenting_distance,
            heading_error_deg=heading_error,
        )
        _check(case.get("expect", {}), result)

        if case.get("follow"):
            recording["cases"].append(
                {
                    "name": case["name"],
                    "query": case["query"],
                    "response": response.text,
                    "goal_id": session.current_goal.id if session.current_goal else None,
                    "route": (
                        {
                            "waypoints": [list(w) for w in session.route.waypoints],
                            "length_m": session.route.length_m,
                        }
                        if session.route
                        else None
                    ),
                    "routes": routes,
                    "ticks": ticks,
                }
            )

    result.passed = not result.failures
    return result


def render_report(report: SimulationReport) -> str:
    """Human-readable pass/fail lines plus a one-line summary."""
    lines = []
    for case in report.cases:
        if case.passed:
            lines.append(f"PASS {case.name} (ticks={case.ticks}, mode={case.final_mode})")
        else:
            lines.append(f"FAIL {case.name}: " + "; ".join(case.failures))
    lines.append(f"{report.passed}/{report.total} scenarios passed")
    return "\n".join(lines)
