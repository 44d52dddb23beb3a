"""Small geometric primitives shared by ingest, planning and the guide.

Coordinates are metric, y is up. Points are plain ``(x, y, z)`` tuples so
they stay hashable, JSON-friendly and cheap to copy; heavier numeric work
(registration, embeddings) converts to numpy at the call site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateBox

Point3 = tuple[float, float, float]
Point2 = tuple[float, float]


def add(a: Point3, b: Point3) -> Point3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub(a: Point3, b: Point3) -> Point3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def scale(a: Point3, s: float) -> Point3:
    return (a[0] * s, a[1] * s, a[2] * s)


def norm(a: Point3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def distance(a: Point3, b: Point3) -> float:
    return norm(sub(a, b))


def planar_distance(a: Point3, b: Point3) -> float:
    """Distance in the ground plane; y is ignored."""
    return math.hypot(a[0] - b[0], a[2] - b[2])


def planar(a: Point3) -> Point2:
    """Project onto the ground plane, dropping y."""
    return (a[0], a[2])


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box. ``min`` must not exceed ``max`` on any axis."""

    min: Point3
    max: Point3

    def __post_init__(self) -> None:
        for axis in range(3):
            if self.min[axis] > self.max[axis]:
                raise DegenerateBox(
                    f"axis {axis}: min {self.min[axis]} > max {self.max[axis]}"
                )

    def centroid(self) -> Point3:
        return (
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        )

    def contains(self, p: Point3) -> bool:
        return all(self.min[i] <= p[i] <= self.max[i] for i in range(3))

    def expanded(self, margin: float) -> "Aabb":
        return Aabb(
            (self.min[0] - margin, self.min[1] - margin, self.min[2] - margin),
            (self.max[0] + margin, self.max[1] + margin, self.max[2] + margin),
        )

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(
            tuple(min(a, b) for a, b in zip(self.min, other.min)),  # type: ignore[arg-type]
            tuple(max(a, b) for a, b in zip(self.max, other.max)),  # type: ignore[arg-type]
        )


def aabb_of_points(points: list[Point3]) -> Aabb:
    if not points:
        raise DegenerateBox("no points")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    zs = [p[2] for p in points]
    return Aabb((min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs)))
