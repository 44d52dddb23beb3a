"""Datatypes passed between the triage, search and response stages."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

from ..geometry import Point3
from ..ingest import BimEntity

Category = Literal["navigation", "inquiry", "greeting", "invalid"]

TargetKind = Literal["explicit", "implicit"]

# session history is capped to this many query/response exchanges
HISTORY_LIMIT = 6


@dataclass(frozen=True)
class UserQuery:
    """One utterance plus the context it arrived in."""

    text: str
    user_position: Point3 | None = None
    session_id: str | None = None
    timestamp: int = 0


@dataclass(frozen=True)
class StructuredTarget:
    """A single goal distilled from the query.

    ``semantics`` holds the retrieval keywords; ``kind`` records whether
    the user named the place outright or expressed a need the place serves.
    """

    kind: TargetKind
    semantics: tuple[str, ...]
    description: str
    qualifier: Literal["nearest", "farthest", "largest", "smallest"] | None = None


@dataclass(frozen=True)
class TriageResult:
    """Outcome of the first stage: an intent and its ordered targets."""

    category: Category
    targets: tuple[StructuredTarget, ...] = ()
    inquiry_topic: str | None = None


@dataclass(frozen=True)
class RankedCandidate:
    """A retrieval hit, annotated with straight-line or route distance."""

    entity: BimEntity
    similarity: float
    distance_m: float | None = None


@dataclass(frozen=True)
class CandidateSet:
    """What the selection stage sees for one target."""

    target: StructuredTarget
    candidates: tuple[RankedCandidate, ...]
    user_position: Point3 | None = None


@dataclass(frozen=True)
class SelectionDecision:
    """Selection stage verdict: an entity id, or a question to ask."""

    selected_id: str | None
    rationale: str
    needs_clarification: bool = False
    clarification_question: str | None = None


@dataclass(frozen=True)
class GoalSelection:
    """A resolved goal, or a pending clarification for one target."""

    entity: BimEntity | None
    rationale: str
    needs_clarification: bool = False
    clarification_question: str | None = None
    candidate_ids: tuple[str, ...] = ()
    similarity: float | None = None
    distance_m: float | None = None


@dataclass(frozen=True)
class AgentResponse:
    """What the pipeline hands back for one query."""

    text: str
    category: Category
    goals: tuple[GoalSelection, ...] = ()
    needs_clarification: bool = False
    error_code: str | None = None


@dataclass(frozen=True)
class Exchange:
    """One past query/response pair kept as conversational context."""

    query: str
    response: str


@dataclass(frozen=True)
class DialogueState:
    """The conversational slice of a session the pipeline reads and writes.

    ``pending_targets`` buffers ordered goals that stalled on a
    clarification question; the next query resumes them.
    """

    history: tuple[Exchange, ...] = ()
    pending_targets: tuple[StructuredTarget, ...] = ()

    def remember(self, query: str, response: str) -> "DialogueState":
        history = (*self.history, Exchange(query=query, response=response))
        return replace(self, history=history[-HISTORY_LIMIT:])

    def with_pending(self, targets: tuple[StructuredTarget, ...]) -> "DialogueState":
        return replace(self, pending_targets=targets)
