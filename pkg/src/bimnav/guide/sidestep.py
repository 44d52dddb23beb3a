"""Choosing where the guide stands while presenting a destination.

Stopping dead on the goal point would leave the guide in the user's way,
so it steps aside: candidates are sampled on a circle around the goal and
scored by how directly they continue the user's approach line. The angle
between user->goal and goal->candidate is the whole score (smaller is
better); standing room is a hard requirement, not a weighted term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..geometry import Point3
from ..spatial import NavGrid, is_walkable
from .state import FollowConfig


@dataclass(frozen=True)
class SideCandidate:
    """One scored standing spot. ``score`` is None when not walkable."""

    position: Point3
    angle_rad: float
    walkable: bool

    @property
    def score(self) -> float | None:
        return -self.angle_rad if self.walkable else None


def sample_side_positions(goal: Point3, radius: float, count: int) -> list[Point3]:
    """``count`` points on the circle around the goal in the ground plane.

    Index 0 sits on the +x axis and indices sweep toward +z, so callers
    and tests agree on candidate numbering.
    """
    positions = []
    for i in range(count):
        theta = 2.0 * math.pi * i / count
        positions.append(
            (
                goal[0] + radius * math.cos(theta),
                goal[1],
                goal[2] + radius * math.sin(theta),
            )
        )
    return positions


def score_side_candidate(
    user: Point3, goal: Point3, position: Point3, grid: NavGrid
) -> SideCandidate:
    """Angle between the approach direction and the candidate offset.

    Directions are projected onto the ground plane. A degenerate approach
    (user standing on the goal) or a zero offset scores as angle zero.
    """
    ax, az = goal[0] - user[0], goal[2] - user[2]
    bx, bz = position[0] - goal[0], position[2] - goal[2]
    norm_a = math.hypot(ax, az)
    norm_b = math.hypot(bx, bz)
    if norm_a == 0.0 or norm_b == 0.0:
        angle = 0.0
    else:
        cos_angle = (ax * bx + az * bz) / (norm_a * norm_b)
        angle = math.acos(max(-1.0, min(1.0, cos_angle)))
    return SideCandidate(
        position=position,
        angle_rad=angle,
        walkable=is_walkable(grid, position),
    )


def select_presentation_pose(
    user: Point3, goal: Point3, grid: NavGrid, config: FollowConfig
) -> Point3:
    """Best walkable candidate; ties keep the lowest index.

    When every candidate is blocked the goal point itself is returned so
    the guide still has somewhere to stop.
    """
    best: tuple[float, int, Point3] | None = None
    for index, position in enumerate(
        sample_side_positions(goal, config.sidestep_radius_m, config.sidestep_candidates)
    ):
        candidate = score_side_candidate(user, goal, position, grid)
        if not candidate.walkable:
            continue
        if best is None or candidate.angle_rad < best[0] - 1e-12:
            best = (candidate.angle_rad, index, position)
    if best is None:
        return goal
    return best[2]
