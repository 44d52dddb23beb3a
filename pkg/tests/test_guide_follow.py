"""Follow behaviour: hysteresis, ramp arithmetic, sidestep handoff."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bimnav.geometry import planar_distance
from bimnav.guide import FollowConfig, GuideMode, GuideState, tick
from bimnav.spatial import NavGrid, Path

from oracles import replay_follow_modes

CFG = FollowConfig()


def _straight_path(length=100.0, start=(0.0, 0.0, 0.0)):
    end = (start[0] + length, start[1], start[2])
    return Path(
        waypoints=(start, end),
        length_m=length,
        cells=((0, 0),),
        grid_length_m=length,
    )


def _open_grid(size_m=200.0, cell=0.5):
    n = int(size_m / cell)
    return NavGrid(
        origin=(-size_m / 2, -size_m / 2),
        cell_size=cell,
        cells=np.ones((n, n), dtype=bool),
    )


GRID = _open_grid()


def _user_at(state, distance):
    # place the user behind the guide along -x at the requested gap
    return (state.position[0] - distance, 0.0, state.position[2])


def _drive(distances, dt=1.0, config=CFG):
    """Tick a guide on a long straight path, holding the user at the given
    planar gaps. Returns modes, states and the float-exact gaps fed in."""
    state = GuideState.idle((0.0, 0.0, 0.0)).with_route(_straight_path(10_000.0))
    modes, states, fed = [], [], []
    for d in distances:
        user = _user_at(state, d)
        fed.append(planar_distance(user, state.position))
        state = tick(state, user, dt, config, GRID)
        modes.append(state.mode.value)
        states.append(state)
    return modes, states, fed


def test_worked_distance_trace():
    distances = [3.0, 5.0, 3.0, 2.5, 1.9]
    modes, _, fed = _drive(distances)
    assert modes == ["walking", "waiting", "waiting", "waiting", "walking"]
    assert modes == replay_follow_modes(fed, CFG.wait_distance_m, CFG.resume_distance_m)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.0, 6.0, allow_nan=False), min_size=1, max_size=40))
def test_mode_trace_matches_replay_oracle(distances):
    modes, _, fed = _drive(distances, dt=0.25)
    assert modes == replay_follow_modes(fed, CFG.wait_distance_m, CFG.resume_distance_m)


def test_walking_speed_is_exact():
    _, states, _ = _drive([1.0, 1.0, 1.0], dt=0.5)
    assert states[0].position[0] == pytest.approx(0.6)
    assert states[1].position[0] == pytest.approx(1.2)
    assert states[2].path_progress_m == pytest.approx(1.8)


@pytest.mark.parametrize(
    "dt, expected",
    [
        # ramp distance v * (t - t^2 / 2T) with t = min(dt, T), T = 0.5 s
        (1.0, 1.2 * (0.5 - 0.25 / 1.0)),
        (0.5, 1.2 * (0.5 - 0.25 / 1.0)),
        (0.1, 1.2 * (0.1 - 0.01 / 1.0)),
    ],
)
def test_stop_ramp_distance(dt, expected):
    _, states, _ = _drive([5.0], dt=dt)
    assert states[0].mode is GuideMode.WAITING
    assert states[0].path_progress_m == pytest.approx(expected, abs=1e-12)


def test_waiting_guide_faces_user_without_moving():
    _, states, _ = _drive([5.0, 3.0, 3.0])
    frozen = states[0].position
    assert states[1].position == frozen
    assert states[2].position == frozen
    # the user sits at -x, so the guide turns to face that way
    assert states[1].heading == pytest.approx((-1.0, 0.0))
    assert states[2].mode is GuideMode.WAITING


def test_resume_moves_in_the_same_tick():
    _, states, _ = _drive([5.0, 1.5], dt=1.0)
    waiting = states[0]
    resumed = states[1]
    assert resumed.mode is GuideMode.WALKING
    assert resumed.path_progress_m == pytest.approx(
        waiting.path_progress_m + CFG.walk_speed_mps * 1.0
    )


def test_boundary_distances_do_not_flip_modes():
    # exactly the wait threshold keeps walking (the first gap is exact by
    # construction); the rest must agree with the replay of the gaps fed
    modes, _, fed = _drive([CFG.wait_distance_m, 5.0, CFG.resume_distance_m])
    assert fed[0] == CFG.wait_distance_m
    assert modes[0] == "walking"
    assert modes == replay_follow_modes(fed, CFG.wait_distance_m, CFG.resume_distance_m)


def test_progress_is_monotonic_and_capped():
    _, states, _ = _drive([1.0] * 30, dt=1.0, config=CFG)
    progress = [s.path_progress_m for s in states]
    assert progress == sorted(progress)
    assert all(p <= 10_000.0 for p in progress)


def test_idle_state_ignores_ticks():
    state = GuideState.idle((1.0, 0.0, 1.0))
    after = tick(state, (0.0, 0.0, 0.0), 0.1, CFG, GRID)
    assert after == state


def test_bad_dt_rejected():
    state = GuideState.idle((0.0, 0.0, 0.0))
    for dt in (0.0, -0.5):
        with pytest.raises(ValueError):
            tick(state, (0.0, 0.0, 0.0), dt, CFG, GRID)


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        FollowConfig(wait_distance_m=2.0, resume_distance_m=2.0)
    with pytest.raises(ValueError):
        FollowConfig(walk_speed_mps=0.0)


def _drive_to_presenting(path, user, dt=0.1, limit=200):
    state = GuideState.idle(path.waypoints[0]).with_route(path)
    seen = [state.mode]
    for _ in range(limit):
        state = tick(state, user, dt, CFG, GRID)
        seen.append(state.mode)
        if state.mode is GuideMode.PRESENTING:
            return state, seen
    raise AssertionError(f"never presented: {seen[-5:]}")


def test_sidestep_near_goal_then_present():
    path = _straight_path(3.0, start=(0.0, 0.0, 0.0))
    user = (-1.0, 0.0, 0.0)
    state, seen = _drive_to_presenting(path, user)
    assert GuideMode.SIDESTEPPING in seen
    # the guide settles on the candidate ring, not on the goal itself
    assert planar_distance(state.position, path.goal) == pytest.approx(
        CFG.sidestep_radius_m, abs=1e-9
    )
    # approach runs along +x and the whole ring is walkable, so the spot
    # directly beyond the goal wins
    assert state.position == pytest.approx((3.75, 0.0, 0.0), abs=1e-9)


def test_presenting_heading_bisects_user_and_goal():
    path = _straight_path(3.0)
    user = (-1.0, 0.0, 0.0)
    state, _ = _drive_to_presenting(path, user)
    state = tick(state, user, 0.1, CFG, GRID)
    to_user = np.array([user[0] - state.position[0], user[2] - state.position[2]])
    to_goal = np.array([state.goal[0] - state.position[0], state.goal[2] - state.position[2]])
    to_user /= np.linalg.norm(to_user)
    to_goal /= np.linalg.norm(to_goal)
    bisector = to_user + to_goal
    bisector /= np.linalg.norm(bisector)
    assert state.heading == pytest.approx(tuple(bisector), abs=1e-9)
    assert state.mode is GuideMode.PRESENTING
    assert math.hypot(*state.heading) == pytest.approx(1.0)


def test_presenting_tracks_a_moving_user():
    path = _straight_path(3.0)
    state, _ = _drive_to_presenting(path, (-1.0, 0.0, 0.0))
    pinned = state.position
    moved = tick(state, (3.75, 0.0, 5.0), 0.1, CFG, GRID)
    assert moved.position == pinned
    assert moved.heading != state.heading


def test_sidestep_walks_at_walk_speed():
    path = _straight_path(3.0)
    user = (-1.0, 0.0, 0.0)
    state = GuideState.idle(path.waypoints[0]).with_route(path)
    previous = None
    while state.mode is not GuideMode.SIDESTEPPING:
        previous = state
        state = tick(state, user, 0.1, CFG, GRID)
    target = state.sidestep_target
    assert target is not None
    before = state.position
    state = tick(state, user, 0.1, CFG, GRID)
    if state.mode is GuideMode.SIDESTEPPING:
        step = planar_distance(state.position, before)
        assert step == pytest.approx(CFG.walk_speed_mps * 0.1, abs=1e-9)
    del previous
