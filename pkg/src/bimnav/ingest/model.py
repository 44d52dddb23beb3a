"""Domain model shared by the STEP and manifest ingest paths."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..geometry import Aabb, Point3


class IfcClass(enum.Enum):
    """The three product classes the engine cares about."""

    SPACE = "space"
    DOOR = "door"
    FURNISHING = "furnishing"

    @classmethod
    def from_step(cls, record_class: str) -> "IfcClass | None":
        return _STEP_CLASSES.get(record_class.upper())


_STEP_CLASSES = {
    "IFCSPACE": IfcClass.SPACE,
    "IFCDOOR": IfcClass.DOOR,
    "IFCFURNISHINGELEMENT": IfcClass.FURNISHING,
}


@dataclass(frozen=True)
class RawElement:
    """One building product as it came out of the source file.

    ``placement`` is the resolved absolute anchor point when the source
    provided one; ``geometry`` is the world-frame bounding box of whatever
    vertices the source geometry exposed. Either may be missing.
    """

    id: str
    ifc_class: IfcClass
    name: str
    description: str
    placement: Point3 | None = None
    geometry: Aabb | None = None
    attributes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AnchorPair:
    """One surveyed correspondence between the two coordinate frames."""

    vps: Point3
    bim: Point3


@dataclass(frozen=True)
class BimModel:
    """Everything ingest produces: elements plus optional frame anchors."""

    building: str
    elements: tuple[RawElement, ...]
    anchors: tuple[AnchorPair, ...] = ()
    source_format: str = "manifest"


@dataclass(frozen=True)
class BimEntity:
    """A navigable entity with a guaranteed position.

    ``attributes`` holds the structured facts (area_sqm, capacity, hours)
    that responses may quote; values never come from anywhere but the
    source data.
    """

    id: str
    ifc_class: IfcClass
    name: str
    description: str
    position: Point3
    footprint: Aabb | None = None
    attributes: dict = field(default_factory=dict)
