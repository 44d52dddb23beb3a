"""Building data ingest: STEP subset and JSON manifest readers."""

from .extract import (
    DroppedElement,
    ExtractionReport,
    centroid_of_aabb,
    compose_description,
    extract_entities,
    extract_report,
    parse_description_attributes,
)
from .manifest import load_manifest, load_manifest_file
from .model import AnchorPair, BimEntity, BimModel, IfcClass, RawElement
from .step import parse_step_subset

__all__ = [
    "AnchorPair",
    "BimEntity",
    "BimModel",
    "DroppedElement",
    "ExtractionReport",
    "IfcClass",
    "RawElement",
    "centroid_of_aabb",
    "compose_description",
    "extract_entities",
    "extract_report",
    "load_manifest",
    "load_manifest_file",
    "parse_description_attributes",
    "parse_step_subset",
]
