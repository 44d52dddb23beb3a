"""The guide's per-tick locomotion and mode logic.

All thresholds are evaluated against the user/guide distance at the start
of the tick, then the guide moves; that keeps mode sequences a pure
function of the distance trace, which is also how the tests replay them.
Walking halts with a short linear slow-down when the user falls behind
(the covered ramp distance is folded into the transition tick), and
resumes only once the user has closed to the resume distance, so the pair
of thresholds forms a hysteresis band with no mode chatter inside it.
"""

from __future__ import annotations

import logging
import math

from dataclasses import replace

from ..geometry import Point2, Point3, planar_distance
from ..spatial import NavGrid, Path
from .sidestep import select_presentation_pose
from .state import FollowConfig, GuideMode, GuideState

LOGGER = logging.getLogger(__name__)


def tick(
    state: GuideState,
    user_position: Point3,
    dt: float,
    config: FollowConfig,
    grid: NavGrid,
) -> GuideState:
    """Advance the guide by one simulation step of ``dt`` seconds."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.mode is GuideMode.IDLE or state.path is None:
        return state

    distance = planar_distance(user_position, state.position)

    if state.mode is GuideMode.WALKING:
        if distance > config.wait_distance_m:
            # the user fell behind: cover the slow-down ramp, then hold
            ramp = _ramp_distance(config, dt)
            new_state = _advance_along_path(state, ramp)
            return replace(
                new_state,
                mode=GuideMode.WAITING,
                heading=_toward(new_state.position, user_position, new_state.heading),
            )
        return _walk_and_maybe_sidestep(state, user_position, dt, config, grid)

    if state.mode is GuideMode.WAITING:
        if distance <= config.resume_distance_m:
            return _walk_and_maybe_sidestep(state, user_position, dt, config, grid)
        return replace(state, heading=_toward(state.position, user_position, state.heading))

    if state.mode is GuideMode.SIDESTEPPING:
        return _sidestep_step(state, user_position, dt, config)

    if state.mode is GuideMode.PRESENTING:
        return replace(state, heading=_presentation_heading(state, user_position))

    return state


def _walk_and_maybe_sidestep(
    state: GuideState,
    user_position: Point3,
    dt: float,
    config: FollowConfig,
    grid: NavGrid,
) -> GuideState:
    new_state = replace(
        _advance_along_path(state, config.walk_speed_mps * dt),
        mode=GuideMode.WALKING,
    )
    remaining = new_state.path.length_m - new_state.path_progress_m
    if remaining <= config.sidestep_trigger_m:
        goal = new_state.goal if new_state.goal is not None else new_state.path.goal
        target = select_presentation_pose(user_position, goal, grid, config)
        return replace(
            new_state,
            mode=GuideMode.SIDESTEPPING,
            sidestep_target=target,
        )
    return new_state


def _sidestep_step(
    state: GuideState, user_position: Point3, dt: float, config: FollowConfig
) -> GuideState:
    target = state.sidestep_target
    if target is None:
        return replace(state, mode=GuideMode.PRESENTING)
    dx = target[0] - state.position[0]
    dz = target[2] - state.position[2]
    gap = math.hypot(dx, dz)
    step = config.walk_speed_mps * dt
    if gap <= step or gap == 0.0:
        arrived = replace(state, position=target, mode=GuideMode.PRESENTING)
        return replace(arrived, heading=_presentation_heading(arrived, user_position))
    scale = step / gap
    new_position = (
        state.position[0] + dx * scale,
        state.position[1],
        state.position[2] + dz * scale,
    )
    return replace(state, position=new_position, heading=(dx / gap, dz / gap))


def _advance_along_path(state: GuideState, distance: float) -> GuideState:
    path = state.path
    progress = min(state.path_progress_m + max(distance, 0.0), path.length_m)
    position, heading = _point_along(path, progress, state.heading)
    return replace(
        state,
        position=position,
        heading=heading,
        path_progress_m=progress,
    )


def _point_along(path: Path, progress: float, fallback_heading: Point2):
    remaining = progress
    waypoints = path.waypoints
    for a, b in zip(waypoints, waypoints[1:]):
        seg = math.hypot(b[0] - a[0], b[2] - a[2])
        if seg <= 1e-12:
            continue
        if remaining <= seg:
            t = remaining / seg
            position = (
                a[0] + (b[0] - a[0]) * t,
                a[1] + (b[1] - a[1]) * t,
                a[2] + (b[2] - a[2]) * t,
            )
            heading = ((b[0] - a[0]) / seg, (b[2] - a[2]) / seg)
            return position, heading
        remaining -= seg
    return waypoints[-1], fallback_heading


def _ramp_distance(config: FollowConfig, dt: float) -> float:
    """Distance covered decelerating linearly from walk speed to zero.

    The ramp lasts ``ramp_duration_s``; when the tick is shorter than the
    ramp only the part inside this tick is covered (the mode still flips,
    the leftover ramp is dropped rather than smeared over later ticks).
    """
    duration = config.ramp_duration_s
    if duration <= 0.0:
        return 0.0
    t = min(dt, duration)
    return config.walk_speed_mps * (t - t * t / (2.0 * duration))


def _toward(origin: Point3, target: Point3, fallback: Point2) -> Point2:
    dx = target[0] - origin[0]
    dz = target[2] - origin[2]
    n = math.hypot(dx, dz)
    if n < 1e-12:
        return fallback
    return (dx / n, dz / n)


def _presentation_heading(state: GuideState, user_position: Point3) -> Point2:
    """Face halfway between the user and the goal point."""
    goal = state.goal if state.goal is not None else state.position
    to_user = _toward(state.position, user_position, state.heading)
    to_goal = _toward(state.position, goal, state.heading)
    bx = to_user[0] + to_goal[0]
    bz = to_user[1] + to_goal[1]
    n = math.hypot(bx, bz)
    if n < 1e-12:
        return to_user
    return (bx / n, bz / n)
