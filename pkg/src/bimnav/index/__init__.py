"""Embedding encoders and the flat vector index."""

from .encoder import EMBEDDING_DIM, HttpEncoderClient, ReferenceEncoder, tokenize
from .store import (
    CACHE_VERSION,
    ScoredCandidate,
    VectorStore,
    build_index,
    cosine_similarity,
    dump_store,
    load_store,
    manifest_digest,
    search,
)

__all__ = [
    "CACHE_VERSION",
    "EMBEDDING_DIM",
    "HttpEncoderClient",
    "ReferenceEncoder",
    "ScoredCandidate",
    "VectorStore",
    "build_index",
    "cosine_similarity",
    "dump_store",
    "load_store",
    "manifest_digest",
    "search",
    "tokenize",
]
