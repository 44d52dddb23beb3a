"""Text encoders producing the 768-dim unit vectors the index stores.

The built-in encoder is a hashed bag of words: deterministic, offline and
cheap, which is what the tests and the simulator need. A production-grade
sentence encoder can be swapped in through :class:`HttpEncoderClient` as
long as it serves 768-dim vectors; anything else is rejected up front.
"""

from __future__ import annotations

import logging
import re

import httpx
import numpy as np

from ..errors import EmptyText, EncoderMismatch

LOGGER = logging.getLogger(__name__)

EMBEDDING_DIM = 768

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; empties dropped."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def _fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class ReferenceEncoder:
    """Signed hashed bag-of-words encoder.

    Each token is hashed with 64-bit FNV-1a; the hash picks a bucket
    (mod 768) and a sign (+1 when bit 63 is clear), one increment per
    occurrence, and the sum is L2-normalised. Same text in, same vector
    out, bit for bit.
    """

    dim = EMBEDDING_DIM

    def encode(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText(f"no tokens in {text!r}")
        vec = np.zeros(EMBEDDING_DIM, dtype=np.float64)
        for token in tokens:
            h = _fnv1a_64(token.encode("utf-8"))
            sign = 1.0 if (h >> 63) == 0 else -1.0
            vec[h % EMBEDDING_DIM] += sign
        n = float(np.linalg.norm(vec))
        if n == 0.0:
            # opposite-sign tokens can cancel in a shared bucket; pin the
            # first token's bucket so a unit vector always comes out
            h = _fnv1a_64(tokens[0].encode("utf-8"))
            vec[h % EMBEDDING_DIM] = 1.0
            n = 1.0
        return vec / n

    def encode_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.encode(t) for t in texts]


class HttpEncoderClient:
    """Client for an external embedding service.

    Wire format: POST ``{"texts": [...]}``, response ``{"vectors": [[...]]}``.
    The constructor probes the backend once and refuses dimensions other
    than 768 so a misconfigured service fails at startup, not mid-query.
    """

    dim = EMBEDDING_DIM

    def __init__(self, base_url: str, timeout_s: float = 10.0):
        self._url = base_url.rstrip("/")
        self._client = httpx.Client(timeout=timeout_s)
        probe = self._post(["dimension probe"])
        if len(probe[0]) != EMBEDDING_DIM:
            raise EncoderMismatch(
                f"backend at {base_url} returns dim {len(probe[0])}, need {EMBEDDING_DIM}"
            )
        LOGGER.info("embedding backend %s accepted (dim %d)", base_url, EMBEDDING_DIM)

    def _post(self, texts: list[str]) -> list[list[float]]:
        response = self._client.post(self._url, json={"texts": texts})
        response.raise_for_status()
        payload = response.json()
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EncoderMismatch("backend response missing 'vectors'")
        return vectors

    def encode(self, text: str) -> np.ndarray:
        if not tokenize(text):
            raise EmptyText(f"no tokens in {text!r}")
        vec = np.asarray(self._post([text])[0], dtype=np.float64)
        if vec.shape != (EMBEDDING_DIM,):
            raise EncoderMismatch(f"backend returned shape {vec.shape}")
        n = float(np.linalg.norm(vec))
        if n == 0.0:
            raise EncoderMismatch("backend returned a zero vector")
        return vec / n

    def encode_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.encode(t) for t in texts]
