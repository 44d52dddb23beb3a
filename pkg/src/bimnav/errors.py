"""Typed errors raised across the engine.

Every failure that callers are expected to handle gets its own class so
that the service layer can map them to stable machine-readable codes.
All of them derive from :class:`BimnavError`.
"""

from __future__ import annotations


class BimnavError(Exception):
    """Base class for all engine errors."""

    code = "internal_error"


class ConfigError(BimnavError):
    """Service configuration file or environment override is unusable."""

    code = "config_error"


# --- ingest ---------------------------------------------------------------

class MalformedStep(BimnavError):
    """STEP payload is structurally broken (bad header, unbalanced records)."""

    code = "malformed_step"


class UnsupportedSchema(BimnavError):
    """STEP file declares no IFC schema in FILE_SCHEMA."""

    code = "unsupported_schema"


class SchemaViolation(BimnavError):
    """Manifest JSON violates the documented schema.

    ``path`` points at the offending field, e.g. ``entities[3].position``.
    """

    code = "schema_violation"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class DegenerateBox(BimnavError):
    """Axis-aligned box with min > max on some axis."""

    code = "degenerate_box"


# --- embedding / retrieval -------------------------------------------------

class EmptyText(BimnavError):
    """Text produced no tokens, so there is nothing to encode."""

    code = "empty_text"


class ZeroNorm(BimnavError):
    """Cosine similarity is undefined for a zero-norm vector."""

    code = "zero_norm"


class EncoderMismatch(BimnavError):
    """External embedding backend does not produce 768-dim vectors."""

    code = "encoder_mismatch"


class NoCandidates(BimnavError):
    """Retrieval was asked to choose from an empty candidate set."""

    code = "no_candidates"


# --- language model --------------------------------------------------------

class LlmUnavailable(BimnavError):
    """The LLM backend could not be reached.

    ``retry_after_s`` carries the backoff hint callers should honour.
    """

    code = "llm_unavailable"

    def __init__(self, message: str, retry_after_s: float = 1.0, attempts: int = 1):
        super().__init__(message)
        self.retry_after_s = retry_after_s
        self.attempts = attempts


class UnparseableLlmOutput(BimnavError):
    """LLM kept returning schema-violating output after all re-prompts."""

    code = "unparseable_llm_output"


# --- spatial ----------------------------------------------------------------

class DegenerateAnchors(BimnavError):
    """Too few anchor pairs, or all anchors collinear."""

    code = "degenerate_anchors"


class FrameMismatch(BimnavError):
    """Pose is not in the frame the transform maps from."""

    code = "frame_mismatch"


class NoWalkableSpace(BimnavError):
    """Model produced a grid with zero walkable cells."""

    code = "no_walkable_space"


class Unreachable(BimnavError):
    """No grid path connects start and goal."""

    code = "unreachable"


class SnapFailed(BimnavError):
    """No walkable cell within the snap radius of the requested point."""

    code = "snap_failed"
