"""Flat in-memory vector index over building entities.

Twenty to a few thousand entities is the expected scale, so search is a
single matrix product against the stacked unit vectors; no ANN structure,
nothing approximate. Ranking ties are broken by entity id so results are
reproducible across runs and platforms.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyText, ZeroNorm
from ..ingest import BimEntity, IfcClass, compose_description
from .encoder import EMBEDDING_DIM

LOGGER = logging.getLogger(__name__)

CACHE_VERSION = 1


@dataclass(frozen=True)
class ScoredCandidate:
    """One search hit: the entity plus its cosine score against the query."""

    entity: BimEntity
    score: float


class VectorStore:
    """Entities in insertion-id order with their embedding matrix."""

    def __init__(self, entities: list[BimEntity], vectors: np.ndarray):
        if vectors.ndim != 2 or vectors.shape != (len(entities), EMBEDDING_DIM):
            raise ValueError(
                f"vectors shape {vectors.shape} does not match "
                f"{len(entities)} entities x {EMBEDDING_DIM}"
            )
        order = sorted(range(len(entities)), key=lambda i: entities[i].id)
        self.entities = [entities[i] for i in order]
        self.vectors = np.ascontiguousarray(vectors[order], dtype=np.float64)
        self._by_id = {e.id: i for i, e in enumerate(self.entities)}

    def __len__(self) -> int:
        return len(self.entities)

    def get(self, entity_id: str) -> BimEntity | None:
        idx = self._by_id.get(entity_id)
        return self.entities[idx] if idx is not None else None

    def vector_of(self, entity_id: str) -> np.ndarray:
        return self.vectors[self._by_id[entity_id]]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNorm("cosine undefined for zero-norm vector")
    return float(np.dot(a, b) / (na * nb))


def build_index(entities: list[BimEntity], encoder) -> VectorStore:
    """Encode every entity's composed text and stack the vectors."""
    vectors = np.zeros((len(entities), EMBEDDING_DIM), dtype=np.float64)
    for i, entity in enumerate(entities):
        text = compose_description(entity)
        try:
            vectors[i] = encoder.encode(text)
        except EmptyText:
            # nameless, descriptionless entities are indexed under their id
            vectors[i] = encoder.encode(entity.id)
    return VectorStore(list(entities), vectors)


def search(store: VectorStore, query_vector: np.ndarray, n: int) -> list[ScoredCandidate]:
    """Top-n entities by cosine score, ties broken by entity id ascending.

    Entity ids are unique and the store is sorted by id, so a stable sort
    on descending score alone realises the tie rule.
    """
    if n <= 0 or len(store) == 0:
        return []
    scores = store.vectors @ query_vector
    qn = float(np.linalg.norm(query_vector))
    if qn == 0.0:
        raise ZeroNorm("cosine undefined for zero-norm query")
    scores = scores / qn  # store vectors are unit-norm already
    top = sorted(range(len(store)), key=lambda i: -scores[i])[:n]
    return [ScoredCandidate(store.entities[i], float(scores[i])) for i in top]


# ---------------------------------------------------------------------------
# cache serialization
# ---------------------------------------------------------------------------

def manifest_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def dump_store(store: VectorStore, source_digest: str) -> bytes:
    """Serialize the store with the source digest used for invalidation."""
    doc = {
        "version": CACHE_VERSION,
        "dim": EMBEDDING_DIM,
        "source_sha256": source_digest,
        "entities": [_entity_to_json(e) for e in store.entities],
        "vectors": [[float(v) for v in row] for row in store.vectors],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def load_store(data: bytes, expected_digest: str | None = None) -> VectorStore | None:
    """Rebuild a cached store; None when stale, wrong-dim or damaged."""
    try:
        doc = json.loads(data)
        if doc["version"] != CACHE_VERSION or doc["dim"] != EMBEDDING_DIM:
            return None
        if expected_digest is not None and doc["source_sha256"] != expected_digest:
            LOGGER.info("index cache is stale, re-encoding")
            return None
        entities = [_entity_from_json(item) for item in doc["entities"]]
        vectors = np.asarray(doc["vectors"], dtype=np.float64)
        return VectorStore(entities, vectors)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError):
        LOGGER.warning("index cache unreadable, re-encoding")
        return None


def _entity_to_json(entity: BimEntity) -> dict:
    doc: dict = {
        "id": entity.id,
        "class": entity.ifc_class.value,
        "name": entity.name,
        "description": entity.description,
        "position": list(entity.position),
        "attributes": entity.attributes,
    }
    if entity.footprint is not None:
        doc["aabb"] = {
            "min": list(entity.footprint.min),
            "max": list(entity.footprint.max),
        }
    return doc


def _entity_from_json(doc: dict) -> BimEntity:
    from ..geometry import Aabb

    footprint = None
    if "aabb" in doc:
        footprint = Aabb(tuple(doc["aabb"]["min"]), tuple(doc["aabb"]["max"]))
    return BimEntity(
        id=doc["id"],
        ifc_class=IfcClass(doc["class"]),
        name=doc["name"],
        description=doc["description"],
        position=tuple(doc["position"]),
        footprint=footprint,
        attributes=doc.get("attributes", {}),
    )
