"""Grid route planning: A* with string-pulled waypoints.

Cell moves are 8-connected; diagonals cost sqrt(2) and are disallowed when
either orthogonal neighbour is blocked, so no path squeezes between two
blocked corners. Raw costs are tracked as (straight, diagonal) step counts
and only converted to meters at the end, which keeps optimality
comparisons exact. After A*, string pulling drops interior cells that a
collision-free straight segment can skip.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass

from ..errors import SnapFailed, Unreachable
from ..geometry import Point3
from .grid import NavGrid

LOGGER = logging.getLogger(__name__)

SNAP_RADIUS_M = 1.0
SQRT2 = math.sqrt(2.0)

_STEPS = (
    (1, 0, False), (-1, 0, False), (0, 1, False), (0, -1, False),
    (1, 1, True), (1, -1, True), (-1, 1, True), (-1, -1, True),
)


@dataclass(frozen=True)
class Path:
    """A planned route in world coordinates.

    ``waypoints`` are the smoothed corner points; ``length_m`` is their
    polyline length. ``cells`` is the raw A* cell path and
    ``grid_length_m`` its pre-smoothing cost, kept for auditability.
    """

    waypoints: tuple[Point3, ...]
    length_m: float
    cells: tuple[tuple[int, int], ...]
    grid_length_m: float

    @property
    def goal(self) -> Point3:
        return self.waypoints[-1]


def plan_route(grid: NavGrid, start: Point3, goal: Point3) -> Path:
    """Shortest smoothed route between the cells nearest start and goal.

    Both endpoints snap to the closest walkable cell center within 1 m
    (SnapFailed otherwise); Unreachable is raised when no cell path
    connects the two.
    """
    start_cell = snap_to_walkable(grid, start)
    goal_cell = snap_to_walkable(grid, goal)

    if start_cell == goal_cell:
        center = grid.center_of(start_cell)
        return Path(waypoints=(center,), length_m=0.0, cells=(start_cell,), grid_length_m=0.0)

    cells, straight, diagonal = _astar(grid, start_cell, goal_cell)
    grid_length = (straight + diagonal * SQRT2) * grid.cell_size

    corners = _string_pull(grid, cells)
    waypoints = tuple(grid.center_of(c) for c in corners)
    length = 0.0
    for a, b in zip(waypoints, waypoints[1:]):
        length += math.hypot(b[0] - a[0], b[2] - a[2])
    return Path(
        waypoints=waypoints,
        length_m=length,
        cells=tuple(cells),
        grid_length_m=grid_length,
    )


def snap_to_walkable(grid: NavGrid, p: Point3) -> tuple[int, int]:
    """Closest walkable cell whose center is within the snap radius."""
    home = grid.cell_of(p)
    if grid.cell_walkable(home):
        return home
    reach = int(math.ceil(SNAP_RADIUS_M / grid.cell_size)) + 1
    best: tuple[float, tuple[int, int]] | None = None
    for dx in range(-reach, reach + 1):
        for dz in range(-reach, reach + 1):
            cell = (home[0] + dx, home[1] + dz)
            if not grid.cell_walkable(cell):
                continue
            center = grid.center_of(cell)
            d = math.hypot(center[0] - p[0], center[2] - p[2])
            if d <= SNAP_RADIUS_M and (best is None or d < best[0] - 1e-12):
                best = (d, cell)
    if best is None:
        raise SnapFailed(f"no walkable cell within {SNAP_RADIUS_M} m of {p}")
    return best[1]


def _astar(
    grid: NavGrid, start: tuple[int, int], goal: tuple[int, int]
) -> tuple[list[tuple[int, int]], int, int]:
    """Cell path plus its exact (straight, diagonal) step counts."""

    def heuristic(cell: tuple[int, int]) -> float:
        dx = abs(cell[0] - goal[0])
        dz = abs(cell[1] - goal[1])
        return (max(dx, dz) - min(dx, dz)) + min(dx, dz) * SQRT2

    # g-costs as (straight, diagonal) pairs; the float key only orders the heap
    best: dict[tuple[int, int], tuple[int, int]] = {start: (0, 0)}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    counter = 0
    heap: list[tuple[float, int, tuple[int, int]]] = [(heuristic(start), 0, start)]
    closed: set[tuple[int, int]] = set()

    while heap:
        _, _, cell = heapq.heappop(heap)
        if cell in closed:
            continue
        closed.add(cell)
        if cell == goal:
            path = [cell]
            while cell in parent:
                cell = parent[cell]
                path.append(cell)
            path.reverse()
            s_cnt, d_cnt = best[goal]
            return path, s_cnt, d_cnt
        cx, cz = cell
        g_s, g_d = best[cell]
        for dx, dz, diag in _STEPS:
            nxt = (cx + dx, cz + dz)
            if not grid.cell_walkable(nxt):
                continue
            if diag and not (
                grid.cell_walkable((cx + dx, cz)) and grid.cell_walkable((cx, cz + dz))
            ):
                continue
            cand = (g_s + (0 if diag else 1), g_d + (1 if diag else 0))
            cur = best.get(nxt)
            if cur is not None and _cost_key(cur) <= _cost_key(cand) + 1e-12:
                continue
            best[nxt] = cand
            parent[nxt] = cell
            counter += 1
            heapq.heappush(heap, (_cost_key(cand) + heuristic(nxt), counter, nxt))

    raise Unreachable(f"no path from cell {start} to cell {goal}")


def _cost_key(cost: tuple[int, int]) -> float:
    return cost[0] + cost[1] * SQRT2


def _string_pull(grid: NavGrid, cells: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Greedy smoothing: from each kept cell, jump to the farthest visible."""
    if len(cells) <= 2:
        return list(cells)
    out = [cells[0]]
    i = 0
    while i < len(cells) - 1:
        j = len(cells) - 1
        while j > i + 1 and not has_line_of_sight(grid, cells[i], cells[j]):
            j -= 1
        out.append(cells[j])
        i = j
    return out


def has_line_of_sight(grid: NavGrid, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True when the center-to-center segment stays on walkable cells."""
    for cell in cells_on_segment(a, b):
        if not grid.cell_walkable(cell):
            return False
    return True


def cells_on_segment(
    a: tuple[int, int], b: tuple[int, int]
) -> list[tuple[int, int]]:
    """Every cell the segment between two cell centers passes through.

    Standard voxel traversal on the unit lattice with centers at integer
    coordinates. When the segment crosses exactly through a lattice corner
    both side cells are included, which forbids corner cutting.
    """
    (ax, az), (bx, bz) = a, b
    cells = [(ax, az)]
    dx = bx - ax
    dz = bz - az
    steps = max(abs(dx), abs(dz))
    if steps == 0:
        return cells
    x, z = ax, az
    step_x = 1 if dx > 0 else -1
    step_z = 1 if dz > 0 else -1
    # parametric distance to the next vertical / horizontal boundary
    t_max_x = (0.5 / abs(dx)) if dx != 0 else math.inf
    t_max_z = (0.5 / abs(dz)) if dz != 0 else math.inf
    t_delta_x = (1.0 / abs(dx)) if dx != 0 else math.inf
    t_delta_z = (1.0 / abs(dz)) if dz != 0 else math.inf
    while (x, z) != (bx, bz):
        if abs(t_max_x - t_max_z) < 1e-12:
            # exact corner crossing: claim both adjacent cells
            cells.append((x + step_x, z))
            cells.append((x, z + step_z))
            x += step_x
            z += step_z
            t_max_x += t_delta_x
            t_max_z += t_delta_z
        elif t_max_x < t_max_z:
            x += step_x
            t_max_x += t_delta_x
        else:
            z += step_z
            t_max_z += t_delta_z
        cells.append((x, z))
    return cells
