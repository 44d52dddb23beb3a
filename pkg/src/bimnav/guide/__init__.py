"""Virtual guide locomotion: follow, wait, side-step, present."""

from .follow import tick
from .sidestep import SideCandidate, sample_side_positions, score_side_candidate, select_presentation_pose
from .state import FollowConfig, GuideMode, GuideState

__all__ = [
    "FollowConfig",
    "GuideMode",
    "GuideState",
    "SideCandidate",
    "sample_side_positions",
    "score_side_candidate",
    "select_presentation_pose",
    "tick",
]
