"""Query pipeline: triage, retrieve, select, respond.

The pipeline is a pure function over :class:`DialogueState`; callers own
the session and thread the returned state back in. Replies are rendered
from templates unless the client's ``compose`` call returns text, and
every fact in a template comes verbatim from the selected entity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .. import geometry
from ..errors import NoCandidates, SnapFailed, Unreachable, UnparseableLlmOutput
from ..geometry import Point3
from ..index import ScoredCandidate, VectorStore, search
from ..ingest import BimEntity
from ..spatial import NavGrid, plan_route
from .llm import LlmClient
from .rules import build_target, tokenize
from .types import (
    AgentResponse,
    CandidateSet,
    DialogueState,
    GoalSelection,
    RankedCandidate,
    SelectionDecision,
    StructuredTarget,
    TriageResult,
    UserQuery,
)

DEFAULT_TOP_N = 5

DistanceFn = Callable[[Point3, BimEntity], float]


class _Encoder:
    """Anything that turns text into a store-compatible vector."""

    def encode(self, text: str): ...


@dataclass(frozen=True)
class SearchContext:
    """Everything retrieval needs: the index, the encoder and a metric."""

    store: VectorStore
    encoder: _Encoder
    top_n: int = DEFAULT_TOP_N
    distance_fn: DistanceFn | None = None


def euclidean_distance(user_position: Point3, entity: BimEntity) -> float:
    return geometry.distance(user_position, entity.position)


def route_distance_fn(grid: NavGrid) -> DistanceFn:
    """Walkable-route metric; unreachable or unsnappable goals cost inf."""

    def fn(user_position: Point3, entity: BimEntity) -> float:
        try:
            return plan_route(grid, user_position, entity.position).length_m
        except (SnapFailed, Unreachable):
            return math.inf

    return fn


def triage(text: str, history: Sequence, llm: LlmClient) -> TriageResult:
    """First stage; an answer the model cannot repair degrades to invalid."""
    try:
        return llm.triage(text, history)
    except UnparseableLlmOutput:
        return TriageResult(category="invalid")


def annotate_distances(
    candidates: Sequence[ScoredCandidate],
    user_position: Point3 | None,
    distance_fn: DistanceFn = euclidean_distance,
) -> tuple[RankedCandidate, ...]:
    """Attach a distance to each hit; None when the user pose is unknown."""
    ranked = []
    for candidate in candidates:
        distance = None
        if user_position is not None:
            distance = distance_fn(user_position, candidate.entity)
        ranked.append(
            RankedCandidate(
                entity=candidate.entity,
                similarity=candidate.score,
                distance_m=distance,
            )
        )
    return tuple(ranked)


def _fallback_clarification(ranked: Sequence[RankedCandidate]) -> str:
    names = ", ".join(c.entity.name for c in ranked[:3])
    return f"I found a few options: {names}. Which one did you mean?"


def retrieve_goal(
    target: StructuredTarget,
    context: SearchContext,
    llm: LlmClient,
    user_position: Point3 | None = None,
) -> GoalSelection:
    """Resolve one target to an entity via search plus the selection stage.

    The ids handed to selection are exactly the top-N search hits, and the
    selected id must come back out of that shortlist.
    """
    query_text = " ".join(target.semantics)
    hits = search(context.store, context.encoder.encode(query_text), context.top_n)
    if not hits:
        raise NoCandidates(f"index returned nothing for {query_text!r}")

    distance_fn = context.distance_fn or euclidean_distance
    ranked = annotate_distances(hits, user_position, distance_fn)
    candidate_ids = tuple(c.entity.id for c in ranked)
    candidate_set = CandidateSet(target=target, candidates=ranked, user_position=user_position)

    try:
        decision = llm.select(candidate_set)
    except UnparseableLlmOutput:
        decision = SelectionDecision(
            selected_id=None,
            rationale="selection output unusable",
            needs_clarification=True,
            clarification_question=_fallback_clarification(ranked),
        )
    # an id from outside the shortlist cannot be trusted either
    if decision.selected_id is not None and decision.selected_id not in candidate_ids:
        decision = SelectionDecision(
            selected_id=None,
            rationale=f"selection returned foreign id {decision.selected_id!r}",
            needs_clarification=True,
            clarification_question=_fallback_clarification(ranked),
        )

    if decision.needs_clarification or decision.selected_id is None:
        return GoalSelection(
            entity=None,
            rationale=decision.rationale,
            needs_clarification=True,
            clarification_question=decision.clarification_question
            or _fallback_clarification(ranked),
            candidate_ids=candidate_ids,
        )

    row = next(c for c in ranked if c.entity.id == decision.selected_id)
    return GoalSelection(
        entity=row.entity,
        rationale=decision.rationale,
        candidate_ids=candidate_ids,
        similarity=row.similarity,
        distance_m=row.distance_m,
    )


def _fmt_number(value: object) -> str:
    if isinstance(value, float) and value == int(value):
        return str(int(value))
    return str(value)


def _attribute_sentences(entity: BimEntity) -> list[str]:
    sentences = []
    attrs = entity.attributes
    if "area_sqm" in attrs:
        sentences.append(f"It is {_fmt_number(attrs['area_sqm'])} square meters.")
    if "capacity" in attrs:
        sentences.append(f"It seats {_fmt_number(attrs['capacity'])} people.")
    if "hours" in attrs:
        sentences.append(f"It is open {attrs['hours']}.")
    return sentences


def _navigation_text(goals: Sequence[GoalSelection]) -> str:
    entities = [g.entity for g in goals if g.entity is not None]
    if len(entities) == 1:
        parts = [f"Sure, let me take you to {entities[0].name}."]
        parts.extend(_attribute_sentences(entities[0]))
        return " ".join(parts)
    names = [e.name for e in entities]
    stops = ", then ".join(names[1:])
    return f"Sure, we'll go to {names[0]} first, then {stops}."


def _inquiry_text(entity: BimEntity, query_text: str) -> str:
    tokens = set(tokenize(query_text))
    attrs = entity.attributes
    if tokens & {"when", "open", "opens", "close", "closes", "hours", "time"} and "hours" in attrs:
        return f"{entity.name} is open {attrs['hours']}."
    if tokens & {"many", "capacity", "seats", "seat", "people", "fit"} and "capacity" in attrs:
        return f"{entity.name} seats {_fmt_number(attrs['capacity'])} people."
    if tokens & {"big", "large", "size", "area"} and "area_sqm" in attrs:
        return f"{entity.name} is {_fmt_number(attrs['area_sqm'])} square meters."
    if entity.description:
        return f"{entity.name}: {entity.description}."
    return f"I found {entity.name}."


_GREETING_TEXT = (
    "Hello! Tell me where you would like to go, or ask me about a room, "
    "and I will take it from there."
)
_INVALID_TEXT = (
    "Sorry, I did not catch a destination in that. Ask me to take you "
    "somewhere in the building, or ask about a room's hours, size or capacity."
)
_NO_GOAL_TEXT = "Sorry, I could not match that to any place in this building."


def _facts_for_compose(goals: Sequence[GoalSelection], clarification: str | None) -> str:
    lines = []
    for goal in goals:
        if goal.entity is None:
            continue
        entity = goal.entity
        line = f"- {entity.name}"
        if entity.description:
            line += f": {entity.description}"
        for key, value in sorted(entity.attributes.items()):
            line += f" [{key}={value}]"
        lines.append(line)
    if clarification:
        lines.append(f"- ask exactly: {clarification}")
    return "\n".join(lines) or "(no destination facts)"


def respond(
    category: str,
    goals: Sequence[GoalSelection],
    query: UserQuery,
    llm: LlmClient,
    clarification: str | None = None,
) -> str:
    """Render the reply, template-first with an optional composed override."""
    if clarification:
        template = clarification
    elif category == "greeting":
        template = _GREETING_TEXT
    elif category == "invalid":
        template = _INVALID_TEXT
    elif category == "inquiry":
        entity = goals[0].entity if goals and goals[0].entity else None
        template = _inquiry_text(entity, query.text) if entity else _NO_GOAL_TEXT
    elif category == "navigation" and any(g.entity is not None for g in goals):
        template = _navigation_text(goals)
    else:
        template = _NO_GOAL_TEXT
    try:
        composed = llm.compose(query.text, category, _facts_for_compose(goals, clarification))
    except UnparseableLlmOutput:
        composed = None
    return composed or template


def _merge_pending(pending: StructuredTarget, reply: StructuredTarget) -> StructuredTarget:
    semantics = tuple(dict.fromkeys((*pending.semantics, *reply.semantics)))
    return replace(
        pending,
        semantics=semantics,
        qualifier=pending.qualifier or reply.qualifier,
        description=f"{pending.description} ({reply.description})",
    )


def handle_query(
    query: UserQuery,
    dialogue: DialogueState,
    context: SearchContext,
    llm: LlmClient,
) -> tuple[AgentResponse, DialogueState]:
    """Run one utterance through the pipeline and advance the dialogue.

    Returns the response together with the next dialogue state; the
    caller stores the state and reads resolved goals off the response.
    """
    text = query.text.strip()
    if not text:
        response = AgentResponse(text=_INVALID_TEXT, category="invalid", error_code="empty_query")
        return response, dialogue.remember(query.text, response.text)

    result = triage(text, dialogue.history, llm)
    category = result.category
    targets = result.targets
    pending = dialogue.pending_targets

    if category == "navigation":
        pending = ()
    elif pending and category in ("invalid", "inquiry"):
        # the utterance answers the open clarification question
        reply_target = build_target(text, allow_bare_qualifier=True)
        if reply_target is None:
            question = _fallback_question(pending[0])
            response = AgentResponse(
                text=question, category="navigation", needs_clarification=True
            )
            return response, dialogue.remember(query.text, response.text)
        category = "navigation"
        targets = (_merge_pending(pending[0], reply_target), *pending[1:])
        pending = ()
    elif category == "inquiry":
        topic_target = build_target(result.inquiry_topic or text)
        if topic_target is None:
            category = "invalid"
        else:
            targets = (topic_target,)

    goals: list[GoalSelection] = []
    clarification: str | None = None
    error_code: str | None = None
    if category in ("navigation", "inquiry"):
        for index, target in enumerate(targets):
            try:
                selection = retrieve_goal(target, context, llm, query.user_position)
            except NoCandidates as exc:
                goals.append(GoalSelection(entity=None, rationale=str(exc)))
                error_code = exc.code
                break
            goals.append(selection)
            if selection.needs_clarification:
                pending = targets[index:]
                clarification = selection.clarification_question
                break

    text_out = respond(category, goals, query, llm, clarification=clarification)
    response = AgentResponse(
        text=text_out,
        category=category,
        goals=tuple(goals),
        needs_clarification=clarification is not None,
        error_code=error_code,
    )
    next_state = dialogue.with_pending(tuple(pending)).remember(query.text, response.text)
    return response, next_state


def _fallback_question(target: StructuredTarget) -> str:
    wanted = " ".join(target.semantics)
    return f"Sorry, I still need a bit more detail: which {wanted} did you mean?"
