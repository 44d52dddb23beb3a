"""Deterministic triage and selection rules.

These back :class:`~bimnav.agents.llm.RuleBasedLlmClient`, the offline
stand-in for a hosted language model. The rules are intentionally small:
they cover the utterance patterns the rest of the pipeline is exercised
with and degrade to ``invalid`` rather than guess.
"""

from __future__ import annotations

import math
import re
from typing import Sequence

from ..ingest import BimEntity
from .types import (
    CandidateSet,
    Exchange,
    RankedCandidate,
    SelectionDecision,
    StructuredTarget,
    TriageResult,
)

_TOKEN_RE = re.compile(r"[^a-z0-9]+")

# greetings match only when they are the whole utterance
GREETING_WORDS = frozenset({"hello", "hi", "hey", "good", "morning", "afternoon", "evening"})

_INTERROGATIVES = frozenset({"when", "what", "how", "where", "who", "which", "is", "are", "does", "do"})

# words that point at an entity attribute rather than a destination
_ATTRIBUTE_WORDS = frozenset(
    {"open", "opens", "close", "closes", "hours", "time", "many", "capacity", "seats", "big", "large", "size"}
)

_MOTION_WORDS = frozenset({"take", "go", "going", "guide", "find", "bring", "show", "navigate", "walk"})

# a need maps to the keywords of the place that satisfies it
NEED_KEYWORDS: dict[str, tuple[str, ...]] = {
    "hungry": ("food", "snacks", "cafeteria"),
    "thirsty": ("drink", "coffee", "water"),
    "coffee": ("coffee shop", "coffee", "drink"),
    "eat": ("food", "snacks", "cafeteria"),
    "drink": ("drink", "coffee", "water"),
}

_QUALIFIERS = {
    "nearest": "nearest",
    "closest": "nearest",
    "farthest": "farthest",
    "furthest": "farthest",
    "largest": "largest",
    "biggest": "largest",
    "smallest": "smallest",
}

_GENDER_CANON = {
    "woman": "women",
    "women": "women",
    "womens": "women",
    "girl": "women",
    "girls": "women",
    "female": "women",
    "ladies": "women",
    "lady": "women",
    "man": "men",
    "men": "men",
    "mens": "men",
    "boy": "men",
    "boys": "men",
    "male": "men",
    "gents": "men",
    "gentlemen": "men",
}

_STOPWORDS = frozenset(
    {
        "a", "an", "the", "i", "im", "me", "my", "we", "us", "you", "your", "it", "its",
        "is", "are", "am", "was", "be", "been", "do", "does", "did", "have", "has", "had",
        "can", "could", "would", "should", "will", "wont", "want", "wanted", "need", "needs",
        "please", "to", "at", "of", "for", "on", "in", "with", "there", "here", "that",
        "this", "these", "those", "some", "any", "one", "ones", "get", "got", "let", "lets",
        "like", "really", "just", "s", "m", "re", "ll", "d", "t", "u",
        "and", "then", "before", "after", "how", "what", "when", "where", "who", "which",
        "way", "place", "somewhere",
    }
    | _MOTION_WORDS
)

# clause separators for multi-goal requests; utterance order is visit order
_SPLIT_RE = re.compile(r"\b(?:and\s+then|then|before)\b")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_RE.split(text.lower()) if t]


def content_tokens(text: str) -> list[str]:
    """Lowercased tokens with filler removed and gender words canonicalized."""
    out: list[str] = []
    for tok in tokenize(text):
        tok = _GENDER_CANON.get(tok, tok)
        if tok not in _STOPWORDS:
            out.append(tok)
    return out


def _dedup(words: Sequence[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(words))


def build_target(clause: str, *, allow_bare_qualifier: bool = False) -> StructuredTarget | None:
    """Distill one clause into a retrieval target, or None if it is empty.

    ``allow_bare_qualifier`` admits clauses like "the nearest one" that
    carry a qualifier but no keywords; callers merging into an earlier
    target use it.
    """
    qualifier = None
    keywords: list[str] = []
    expansions: list[str] = []
    for tok in content_tokens(clause):
        if tok in _QUALIFIERS and qualifier is None:
            qualifier = _QUALIFIERS[tok]
        elif tok in NEED_KEYWORDS:
            expansions.extend(NEED_KEYWORDS[tok])
        else:
            keywords.append(tok)
    semantics = _dedup((*keywords, *expansions))
    if not semantics and not (allow_bare_qualifier and qualifier):
        return None
    kind = "implicit" if expansions else "explicit"
    return StructuredTarget(
        kind=kind,
        semantics=semantics,
        description=clause.strip(),
        qualifier=qualifier,
    )


def _is_greeting(tokens: list[str]) -> bool:
    return bool(tokens) and all(t in GREETING_WORDS for t in tokens)


def _is_inquiry(tokens: list[str]) -> bool:
    toks = set(tokens)
    return bool(toks & _INTERROGATIVES) and bool(toks & _ATTRIBUTE_WORDS)


def _is_navigation(tokens: list[str]) -> bool:
    toks = set(tokens)
    if toks & _MOTION_WORDS:
        return True
    if "where" in toks:
        return True
    return bool(toks & NEED_KEYWORDS.keys())


def triage_rules(text: str, history: Sequence[Exchange] = ()) -> TriageResult:
    """Classify an utterance and extract its ordered targets."""
    tokens = tokenize(text)
    if _is_greeting(tokens):
        return TriageResult(category="greeting")
    # attribute questions win over motion phrasing so "when does the
    # coffee shop open" is not mistaken for a coffee run
    if _is_inquiry(tokens):
        topic = " ".join(content_tokens(text)) or None
        return TriageResult(category="inquiry", inquiry_topic=topic)
    if _is_navigation(tokens):
        targets = []
        for clause in _SPLIT_RE.split(text.lower()):
            target = build_target(clause)
            if target is not None:
                targets.append(target)
        if targets:
            return TriageResult(category="navigation", targets=tuple(targets))
    return TriageResult(category="invalid")


def entity_terms(entity: BimEntity) -> set[str]:
    """Search terms an entity exposes: name, description and attribute words."""
    terms = set(tokenize(entity.name))
    if entity.description:
        terms.update(tokenize(entity.description))
    for key, value in entity.attributes.items():
        terms.update(tokenize(key))
        terms.update(tokenize(str(value)))
    return {_GENDER_CANON.get(t, t) for t in terms}


def _matches_keywords(entity: BimEntity, semantics: Sequence[str]) -> bool:
    terms = entity_terms(entity)
    for phrase in semantics:
        if any(tok in terms for tok in tokenize(phrase)):
            return True
    return False


def _entity_gender(entity: BimEntity) -> str | None:
    genders = {_GENDER_CANON[t] for t in tokenize(entity.name) if t in _GENDER_CANON}
    if len(genders) == 1:
        return next(iter(genders))
    return None


def _target_gender(target: StructuredTarget) -> str | None:
    for phrase in target.semantics:
        for tok in tokenize(phrase):
            if tok in _GENDER_CANON:
                return _GENDER_CANON[tok]
    return None


def _distance_or_inf(candidate: RankedCandidate) -> float:
    return candidate.distance_m if candidate.distance_m is not None else math.inf


def select_rules(candidate_set: CandidateSet) -> SelectionDecision:
    """Pick one candidate per the qualifier, or ask when gender is ambiguous."""
    target = candidate_set.target
    candidates = list(candidate_set.candidates)
    if not candidates:
        return SelectionDecision(selected_id=None, rationale="no candidates")

    matching = [c for c in candidates if _matches_keywords(c.entity, target.semantics)]
    pool = matching or candidates

    qualifier = target.qualifier
    if qualifier in ("nearest", "farthest") and any(c.distance_m is not None for c in pool):
        if qualifier == "nearest":
            key = lambda c: (_distance_or_inf(c), c.entity.id)
        else:
            # unknown or unreachable never wins "farthest"
            key = lambda c: (
                -c.distance_m if c.distance_m is not None and math.isfinite(c.distance_m) else math.inf,
                c.entity.id,
            )
        best = min(pool, key=key)
        return SelectionDecision(selected_id=best.entity.id, rationale=f"{qualifier} of {len(pool)} matches")
    if qualifier in ("largest", "smallest"):
        sized = [c for c in pool if "area_sqm" in c.entity.attributes]
        if sized:
            sign = -1.0 if qualifier == "largest" else 1.0
            best = min(sized, key=lambda c: (sign * float(c.entity.attributes["area_sqm"]), c.entity.id))
            return SelectionDecision(selected_id=best.entity.id, rationale=f"{qualifier} by floor area")

    if qualifier is None and _target_gender(target) is None:
        gendered = {}
        for c in matching:
            gender = _entity_gender(c.entity)
            if gender is not None and gender not in gendered:
                gendered[gender] = c.entity
        if len(gendered) >= 2:
            names = " or the ".join(e.name for e in gendered.values())
            return SelectionDecision(
                selected_id=None,
                rationale="gendered candidates, no preference stated",
                needs_clarification=True,
                clarification_question=f"Did you mean the {names}?",
            )

    best = min(pool, key=lambda c: (-c.similarity, c.entity.id))
    return SelectionDecision(selected_id=best.entity.id, rationale="highest similarity")
