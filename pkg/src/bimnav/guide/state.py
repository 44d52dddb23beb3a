"""State carried by the virtual guide between ticks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from ..geometry import Point2, Point3
from ..spatial import Path


class GuideMode(enum.Enum):
    IDLE = "idle"
    WALKING = "walking"
    WAITING = "waiting"
    SIDESTEPPING = "sidestepping"
    PRESENTING = "presenting"


@dataclass(frozen=True)
class FollowConfig:
    """Tuning for the follow behaviour; tests pin values through here.

    ``wait_distance_m`` must stay strictly above ``resume_distance_m`` or
    the walk/wait pair would oscillate on a single boundary.
    """

    walk_speed_mps: float = 1.2
    wait_distance_m: float = 4.0
    resume_distance_m: float = 2.0
    sidestep_trigger_m: float = 1.5
    sidestep_radius_m: float = 0.75
    sidestep_candidates: int = 10
    ramp_duration_s: float = 0.5

    def __post_init__(self) -> None:
        if self.resume_distance_m >= self.wait_distance_m:
            raise ValueError(
                f"resume distance {self.resume_distance_m} must be below "
                f"wait distance {self.wait_distance_m}"
            )
        if self.walk_speed_mps <= 0.0:
            raise ValueError("walk speed must be positive")


@dataclass(frozen=True)
class GuideState:
    """Immutable guide snapshot; :func:`bimnav.guide.tick` makes the next one.

    ``heading`` is a unit direction in the ground plane. ``path_progress_m``
    is the arc length already covered along the current route and never
    decreases except when a new route is assigned.
    """

    mode: GuideMode
    position: Point3
    heading: Point2 = (1.0, 0.0)
    path: Path | None = None
    path_progress_m: float = 0.0
    goal: Point3 | None = None
    sidestep_target: Point3 | None = None

    @staticmethod
    def idle(position: Point3) -> "GuideState":
        return GuideState(mode=GuideMode.IDLE, position=position)

    def with_route(self, path: Path, goal: Point3 | None = None) -> "GuideState":
        """Start walking a new route from its first waypoint."""
        return replace(
            self,
            mode=GuideMode.WALKING,
            position=path.waypoints[0],
            path=path,
            path_progress_m=0.0,
            goal=goal if goal is not None else path.goal,
            sidestep_target=None,
        )
