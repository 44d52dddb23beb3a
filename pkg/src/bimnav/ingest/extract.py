"""Turn raw parsed elements into navigable entities.

Every entity needs a position: the resolved placement when the source had
one, otherwise the centroid of its bounding box. Elements with neither are
dropped, and the drop is reported rather than silently swallowed. This is
also where structured attributes are filled in: manifests carry them
explicitly, STEP descriptions are mined with a few fixed patterns.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from ..geometry import Aabb, Point3
from .model import BimEntity, BimModel, RawElement

LOGGER = logging.getLogger(__name__)

_AREA_RE = re.compile(r"(\d+(?:\.\d+)?)\s+square\s+meters", re.IGNORECASE)
_CAPACITY_RE = re.compile(r"capacity\s+of\s+(\d+)", re.IGNORECASE)
_HOURS_RE = re.compile(
    r"(\d{1,2}:\d{2}\s*(?:AM|PM)\s+to\s+\d{1,2}:\d{2}\s*(?:AM|PM))", re.IGNORECASE
)


@dataclass(frozen=True)
class DroppedElement:
    """An element extraction refused, with the reason it was skipped."""

    id: str
    reason: str


@dataclass(frozen=True)
class ExtractionReport:
    entities: tuple[BimEntity, ...]
    dropped: tuple[DroppedElement, ...] = field(default_factory=tuple)


def centroid_of_aabb(box: Aabb) -> Point3:
    """Midpoint of the box; raises DegenerateBox via Aabb construction."""
    return box.centroid()


def extract_entities(model: BimModel) -> list[BimEntity]:
    """Entities with positions; drops are logged, see :func:`extract_report`."""
    return list(extract_report(model).entities)


def extract_report(model: BimModel) -> ExtractionReport:
    entities = []
    dropped = []
    for element in model.elements:
        if element.placement is not None:
            position = element.placement
        elif element.geometry is not None:
            position = centroid_of_aabb(element.geometry)
        else:
            LOGGER.warning("dropping element %s: no placement and no geometry", element.id)
            dropped.append(DroppedElement(element.id, "no placement and no geometry"))
            continue
        entities.append(
            BimEntity(
                id=element.id,
                ifc_class=element.ifc_class,
                name=element.name,
                description=element.description,
                position=position,
                footprint=element.geometry,
                attributes=_attributes_for(element),
            )
        )
    return ExtractionReport(entities=tuple(entities), dropped=tuple(dropped))


def compose_description(entity: BimEntity) -> str:
    """Text fed to the embedding encoder: name plus description."""
    if entity.description:
        return f"{entity.name}. {entity.description}"
    return entity.name


def _attributes_for(element: RawElement) -> dict:
    if element.attributes:
        return dict(element.attributes)
    return parse_description_attributes(element.description)


def parse_description_attributes(description: str) -> dict:
    """Mine area, capacity and opening hours out of free-form text."""
    attributes: dict = {}
    area = _AREA_RE.search(description)
    if area:
        value = float(area.group(1))
        attributes["area_sqm"] = int(value) if value.is_integer() else value
    capacity = _CAPACITY_RE.search(description)
    if capacity:
        attributes["capacity"] = int(capacity.group(1))
    hours = _HOURS_RE.search(description)
    if hours:
        attributes["hours"] = hours.group(1)
    return attributes
