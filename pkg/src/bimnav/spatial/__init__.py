"""Frame registration, walkability grids and route planning."""

from .grid import (
    DEFAULT_CELL_SIZE_M,
    NavGrid,
    build_nav_grid,
    dump_ascii,
    dump_pgm,
    is_walkable,
)
from .planner import (
    SNAP_RADIUS_M,
    Path,
    cells_on_segment,
    has_line_of_sight,
    plan_route,
    snap_to_walkable,
)
from .transform import (
    HIGH_RESIDUAL_M,
    IDENTITY_QUAT,
    AlignmentResult,
    Pose,
    Quaternion,
    RigidTransform,
    apply_transform,
    estimate_transform,
    quat_conjugate,
    quat_from_matrix,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
    yaw_quaternion,
)

__all__ = [
    "DEFAULT_CELL_SIZE_M",
    "HIGH_RESIDUAL_M",
    "IDENTITY_QUAT",
    "SNAP_RADIUS_M",
    "AlignmentResult",
    "NavGrid",
    "Path",
    "Pose",
    "Quaternion",
    "RigidTransform",
    "apply_transform",
    "build_nav_grid",
    "cells_on_segment",
    "dump_ascii",
    "dump_pgm",
    "estimate_transform",
    "has_line_of_sight",
    "is_walkable",
    "plan_route",
    "quat_conjugate",
    "quat_from_matrix",
    "quat_multiply",
    "quat_normalize",
    "quat_rotate",
    "quat_to_matrix",
    "snap_to_walkable",
    "yaw_quaternion",
]
