"""Loader for the JSON building manifest.

The manifest is the hand-maintained ingest path: a building name, a list
of entities (class, name, description, position and/or aabb, optional
attributes) and optional frame anchor pairs. Validation failures raise
:class:`SchemaViolation` carrying the JSON path of the offending field.
"""

from __future__ import annotations

import json

from ..errors import DegenerateBox, SchemaViolation
from ..geometry import Aabb, Point3
from .model import AnchorPair, BimModel, IfcClass, RawElement

_CLASSES = {"space": IfcClass.SPACE, "door": IfcClass.DOOR, "furnishing": IfcClass.FURNISHING}

_ENTITY_KEYS = {"id", "class", "name", "description", "position", "aabb", "attributes"}


def load_manifest(data: bytes) -> BimModel:
    """Parse and validate manifest JSON into a :class:`BimModel`."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("$", "top level must be an object")

    building = doc.get("building")
    if not isinstance(building, str) or not building:
        raise SchemaViolation("building", "required non-empty string")

    raw_entities = doc.get("entities")
    if not isinstance(raw_entities, list):
        raise SchemaViolation("entities", "required array")

    elements = []
    seen_ids: set[str] = set()
    for idx, item in enumerate(raw_entities):
        elements.append(_parse_entity(item, f"entities[{idx}]", seen_ids))

    anchors = ()
    if "anchors" in doc:
        anchors = _parse_anchors(doc["anchors"])

    return BimModel(
        building=building,
        elements=tuple(elements),
        anchors=anchors,
        source_format="manifest",
    )


def load_manifest_file(path) -> BimModel:
    with open(path, "rb") as handle:
        return load_manifest(handle.read())


def _parse_entity(item, path: str, seen_ids: set[str]) -> RawElement:
    if not isinstance(item, dict):
        raise SchemaViolation(path, "entity must be an object")
    unknown = set(item) - _ENTITY_KEYS
    if unknown:
        raise SchemaViolation(f"{path}.{sorted(unknown)[0]}", "unknown field")

    entity_id = item.get("id")
    if not isinstance(entity_id, str) or not entity_id:
        raise SchemaViolation(f"{path}.id", "required non-empty string")
    if entity_id in seen_ids:
        raise SchemaViolation(f"{path}.id", f"duplicate id {entity_id!r}")
    seen_ids.add(entity_id)

    class_name = item.get("class")
    if class_name not in _CLASSES:
        raise SchemaViolation(
            f"{path}.class", f"must be one of {sorted(_CLASSES)}, got {class_name!r}"
        )

    name = item.get("name")
    if not isinstance(name, str):
        raise SchemaViolation(f"{path}.name", "required string")
    description = item.get("description", "")
    if not isinstance(description, str):
        raise SchemaViolation(f"{path}.description", "must be a string")

    position = None
    if "position" in item:
        position = _parse_point(item["position"], f"{path}.position")

    aabb = None
    if "aabb" in item:
        aabb = _parse_aabb(item["aabb"], f"{path}.aabb")

    attributes = item.get("attributes", {})
    if not isinstance(attributes, dict):
        raise SchemaViolation(f"{path}.attributes", "must be an object")

    return RawElement(
        id=entity_id,
        ifc_class=_CLASSES[class_name],
        name=name,
        description=description,
        placement=position,
        geometry=aabb,
        attributes=dict(attributes),
    )


def _parse_point(value, path: str) -> Point3:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaViolation(path, "must be [x, y, z] numbers")
    return (float(value[0]), float(value[1]), float(value[2]))


def _parse_aabb(value, path: str) -> Aabb:
    if not isinstance(value, dict) or set(value) != {"min", "max"}:
        raise SchemaViolation(path, "must be an object with min and max")
    low = _parse_point(value["min"], f"{path}.min")
    high = _parse_point(value["max"], f"{path}.max")
    try:
        return Aabb(low, high)
    except DegenerateBox as exc:
        raise SchemaViolation(path, f"degenerate box: {exc}") from exc


def _parse_anchors(value) -> tuple[AnchorPair, ...]:
    if not isinstance(value, list):
        raise SchemaViolation("anchors", "must be an array")
    pairs = []
    for idx, item in enumerate(value):
        if not isinstance(item, dict) or set(item) != {"vps", "bim"}:
            raise SchemaViolation(f"anchors[{idx}]", "must be an object with vps and bim")
        pairs.append(
            AnchorPair(
                vps=_parse_point(item["vps"], f"anchors[{idx}].vps"),
                bim=_parse_point(item["bim"], f"anchors[{idx}].bim"),
            )
        )
    return tuple(pairs)
