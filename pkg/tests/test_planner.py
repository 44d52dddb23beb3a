"""Route planner: optimality against Dijkstra, snapping, smoothing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bimnav.errors import SnapFailed, Unreachable
from bimnav.spatial import (
    NavGrid,
    Path,
    cells_on_segment,
    has_line_of_sight,
    plan_route,
    snap_to_walkable,
)

from oracles import SQRT2, dijkstra_grid_cost, flood_fill_components


def _grid_of(rows, cell_size=1.0):
    """Build a NavGrid from ascii art rows; row 0 is the lowest z slice."""
    depth = len(rows)
    width = len(rows[0])
    cells = np.zeros((width, depth), dtype=bool)
    for iz, row in enumerate(rows):
        for ix, ch in enumerate(row):
            cells[ix, iz] = ch == "."
    return NavGrid(origin=(0.0, 0.0), cell_size=cell_size, cells=cells)


def _walkable_set(grid):
    return {tuple(c) for c in np.argwhere(grid.cells)}


def test_same_cell_route(grid):
    start = (20.0, 0.0, 10.0)
    path = plan_route(grid, start, (20.05, 0.0, 10.05))
    assert len(path.waypoints) == 1
    assert path.length_m == 0.0
    assert path.cells == (grid.cell_of(start),)


def test_fixture_route_uses_the_door(grid):
    path = plan_route(grid, (20.0, 0.0, 10.0), (4.0, 0.0, 16.0))
    assert path.length_m > 0.0
    assert path.length_m <= path.grid_length_m + 1e-9
    # every cell crossing the wall strip between corridor and reception
    # must sit inside the door's x range
    for cell in path.cells:
        assert grid.cell_walkable(cell)
        x, _, z = grid.center_of(cell)
        if 11.5 < z < 12.0:
            assert 3.5 < x < 4.5
    assert path.goal == path.waypoints[-1]


def test_waypoints_are_mutually_visible(grid):
    path = plan_route(grid, (1.0, 0.0, 5.0), (37.0, 0.0, 14.0))
    cell_pairs = zip(path.cells, path.cells[1:])
    assert all(grid.cell_walkable(c) for c in path.cells)
    corner_cells = [grid.cell_of(w) for w in path.waypoints]
    assert corner_cells[0] == path.cells[0]
    assert corner_cells[-1] == path.cells[-1]
    for a, b in zip(corner_cells, corner_cells[1:]):
        assert has_line_of_sight(grid, a, b)
    del cell_pairs


def test_unreachable_fixture_room(grid):
    # storage is modelled without a door on purpose
    with pytest.raises(Unreachable):
        plan_route(grid, (20.0, 0.0, 10.0), (17.0, 0.0, 2.0))


def test_snap_inside_and_near(grid):
    inside = snap_to_walkable(grid, (20.0, 0.0, 10.0))
    assert grid.center_of(inside) == pytest.approx((20.125, 0.0, 10.125))
    # a point in the wall strip snaps to the closest walkable cell center
    near = snap_to_walkable(grid, (20.0, 0.0, 11.6))
    assert grid.cell_walkable(near)
    cx, _, cz = grid.center_of(near)
    assert math.hypot(cx - 20.0, cz - 11.6) <= 1.0


def test_snap_failure_far_outside(grid):
    with pytest.raises(SnapFailed):
        snap_to_walkable(grid, (-30.0, 0.0, -30.0))
    with pytest.raises(SnapFailed):
        plan_route(grid, (-30.0, 0.0, -30.0), (20.0, 0.0, 10.0))


def test_no_corner_cutting_through_pinch():
    g = _grid_of(
        [
            ".#",
            "#.",
        ]
    )
    with pytest.raises(Unreachable):
        plan_route(g, g.center_of((0, 0)), g.center_of((1, 1)))


def test_diagonal_requires_both_orthogonals():
    g = _grid_of(
        [
            "...",
            ".#.",
            "...",
        ]
    )
    path = plan_route(g, g.center_of((0, 0)), g.center_of((2, 2)))
    s, d = _step_counts(path, g)
    assert dijkstra_grid_cost(_walkable_set(g), (0, 0), (2, 2)) == (s, d)
    # every diagonal around the center touches the blocked cell, so the
    # optimal route is four straight steps; (0, 2) would mean corner cutting
    assert (s, d) == (4, 0)


def _step_counts(path: Path, grid: NavGrid) -> tuple[int, int]:
    s = d = 0
    for a, b in zip(path.cells, path.cells[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            d += 1
        else:
            s += 1
    assert path.grid_length_m == (s + d * SQRT2) * grid.cell_size
    return s, d


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_routes_match_dijkstra_on_random_grids(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    width, depth = 12, 10
    cells = rng.random((width, depth)) > 0.35
    grid = NavGrid(origin=(0.0, 0.0), cell_size=0.5, cells=cells)
    walkable = _walkable_set(grid)
    if len(walkable) < 2:
        return
    start, goal = [tuple(x) for x in rng.permutation(sorted(walkable))[:2]]
    expected = dijkstra_grid_cost(walkable, start, goal)
    if expected is None:
        with pytest.raises(Unreachable):
            plan_route(grid, grid.center_of(start), grid.center_of(goal))
        return
    path = plan_route(grid, grid.center_of(start), grid.center_of(goal))
    assert _step_counts(path, grid) == expected
    assert path.cells[0] == start and path.cells[-1] == goal
    # smoothing keeps the endpoints, stays collision-free and never grows
    corners = [grid.cell_of(w) for w in path.waypoints]
    assert corners[0] == start and corners[-1] == goal
    for a, b in zip(corners, corners[1:]):
        assert has_line_of_sight(grid, a, b)
    assert path.length_m <= path.grid_length_m + 1e-9


def test_cells_on_segment_axis():
    assert cells_on_segment((0, 0), (3, 0)) == [(0, 0), (1, 0), (2, 0), (3, 0)]
    assert cells_on_segment((2, 2), (2, 2)) == [(2, 2)]


def test_cells_on_segment_corner_claims_both_sides():
    cells = cells_on_segment((0, 0), (1, 1))
    assert (1, 0) in cells and (0, 1) in cells
    assert cells[0] == (0, 0) and cells[-1] == (1, 1)


def test_line_of_sight_respects_pinch():
    g = _grid_of(
        [
            ".#.",
            "#.#",
            ".#.",
        ]
    )
    assert not has_line_of_sight(g, (0, 0), (2, 2))
    open_grid = _grid_of(["...", "...", "..."])
    assert has_line_of_sight(open_grid, (0, 0), (2, 2))


def test_unreachable_components_always_raise():
    g = _grid_of(
        [
            "..#..",
            "..#..",
            "..#..",
        ]
    )
    with pytest.raises(Unreachable):
        plan_route(g, g.center_of((0, 1)), g.center_of((4, 1)))
    assert flood_fill_components(_walkable_set(g)) == 2
