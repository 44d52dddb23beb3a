"""Language-model clients behind a common three-call surface.

``RuleBasedLlmClient`` runs fully offline on the rules in
:mod:`bimnav.agents.rules`. ``HttpLlmClient`` talks to any
chat-completions endpoint and constrains the model with JSON schemas,
re-prompting a bounded number of times before giving up.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from typing import Protocol, Sequence

import httpx
import jsonschema

from ..errors import LlmUnavailable, UnparseableLlmOutput
from .rules import select_rules, triage_rules
from .types import (
    CandidateSet,
    Exchange,
    SelectionDecision,
    StructuredTarget,
    TriageResult,
)

# re-prompts after the first rejected answer
MAX_REPAIR_ROUNDS = 2

_TRIAGE_SCHEMA: dict = {
    "type": "object",
    "properties": {
        "category": {"enum": ["navigation", "inquiry", "greeting", "invalid"]},
        "targets": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["explicit", "implicit"]},
                    "semantics": {
                        "type": "array",
                        "items": {"type": "string"},
                        "minItems": 1,
                    },
                    "description": {"type": "string"},
                    "qualifier": {
                        "enum": ["nearest", "farthest", "largest", "smallest", None]
                    },
                },
                "required": ["kind", "semantics", "description"],
                "additionalProperties": False,
            },
        },
        "inquiry_topic": {"type": ["string", "null"]},
    },
    "required": ["category"],
    "additionalProperties": False,
}

_SELECT_SCHEMA: dict = {
    "type": "object",
    "properties": {
        "selected_id": {"type": ["string", "null"]},
        "needs_clarification": {"type": "boolean"},
        "clarification_question": {"type": ["string", "null"]},
        "rationale": {"type": "string"},
    },
    "required": ["selected_id"],
    "additionalProperties": False,
}

_FENCE_RE = re.compile(r"^```[a-z]*\s*|\s*```$")


def load_prompt(name: str) -> str:
    return (resources.files(__package__) / "prompts" / f"{name}.txt").read_text("utf-8")


class LlmClient(Protocol):
    """The three model calls the query pipeline makes."""

    def triage(self, text: str, history: Sequence[Exchange]) -> TriageResult: ...

    def select(self, candidate_set: CandidateSet) -> SelectionDecision: ...

    def compose(self, utterance: str, category: str, facts: str) -> str | None: ...


class RuleBasedLlmClient:
    """Offline fallback: deterministic rules, template-rendered replies."""

    def triage(self, text: str, history: Sequence[Exchange]) -> TriageResult:
        return triage_rules(text, history)

    def select(self, candidate_set: CandidateSet) -> SelectionDecision:
        return select_rules(candidate_set)

    def compose(self, utterance: str, category: str, facts: str) -> str | None:
        # None tells the pipeline to render its own template
        return None


def _strip_fence(content: str) -> str:
    return _FENCE_RE.sub("", content.strip())


def _format_history(history: Sequence[Exchange]) -> str:
    if not history:
        return "(none)"
    lines = []
    for exchange in history:
        lines.append(f"visitor: {exchange.query}")
        lines.append(f"guide: {exchange.response}")
    return "\n".join(lines)


def _target_from_payload(payload: dict) -> StructuredTarget:
    return StructuredTarget(
        kind=payload["kind"],
        semantics=tuple(payload["semantics"]),
        description=payload["description"],
        qualifier=payload.get("qualifier"),
    )


class HttpLlmClient:
    """Chat-completions client with schema-checked JSON answers.

    A rejected answer (bad JSON or schema violation) is sent back to the
    model with the validator's complaint, at most ``MAX_REPAIR_ROUNDS``
    times; then ``UnparseableLlmOutput`` is raised. Transport and server
    failures raise ``LlmUnavailable`` with retry metadata instead.
    """

    def __init__(
        self,
        base_url: str,
        model: str = "guide-chat",
        timeout_s: float = 10.0,
        client: httpx.Client | None = None,
    ) -> None:
        self.model = model
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout_s)
        self._prompts = {name: load_prompt(name) for name in ("triage", "select", "respond")}

    def triage(self, text: str, history: Sequence[Exchange]) -> TriageResult:
        prompt = self._prompts["triage"].format(
            schema=json.dumps(_TRIAGE_SCHEMA, indent=2),
            history=_format_history(history),
            utterance=text,
        )
        data = self._json_call(prompt, _TRIAGE_SCHEMA)
        targets = tuple(_target_from_payload(t) for t in data.get("targets", ()))
        return TriageResult(
            category=data["category"],
            targets=targets,
            inquiry_topic=data.get("inquiry_topic"),
        )

    def select(self, candidate_set: CandidateSet) -> SelectionDecision:
        rows = []
        for c in candidate_set.candidates:
            distance = "?" if c.distance_m is None else f"{c.distance_m:.1f}"
            rows.append(
                f"{c.entity.id} | {c.entity.name} | {c.entity.description or ''}"
                f" | {c.similarity:.3f} | {distance}"
            )
        prompt = self._prompts["select"].format(
            schema=json.dumps(_SELECT_SCHEMA, indent=2),
            request=candidate_set.target.description,
            qualifier=candidate_set.target.qualifier or "(none)",
            candidates="\n".join(rows) or "(none)",
        )
        data = self._json_call(prompt, _SELECT_SCHEMA)
        return SelectionDecision(
            selected_id=data["selected_id"],
            rationale=data.get("rationale", ""),
            needs_clarification=bool(data.get("needs_clarification", False)),
            clarification_question=data.get("clarification_question"),
        )

    def compose(self, utterance: str, category: str, facts: str) -> str | None:
        prompt = self._prompts["respond"].format(
            utterance=utterance, category=category, facts=facts
        )
        text = self._complete([{"role": "user", "content": prompt}]).strip()
        return text or None

    def _json_call(self, prompt: str, schema: dict) -> dict:
        messages = [{"role": "user", "content": prompt}]
        last_error = "no answer"
        for _ in range(1 + MAX_REPAIR_ROUNDS):
            content = self._complete(messages)
            try:
                data = json.loads(_strip_fence(content))
                jsonschema.validate(data, schema)
                return data
            except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
                last_error = str(exc).splitlines()[0]
                messages.append({"role": "assistant", "content": content})
                messages.append(
                    {
                        "role": "user",
                        "content": (
                            f"That answer was rejected: {last_error}. "
                            "Reply again with only a JSON object matching the schema."
                        ),
                    }
                )
        raise UnparseableLlmOutput(
            f"model output still invalid after {MAX_REPAIR_ROUNDS} repair rounds: {last_error}"
        )

    def _complete(self, messages: list[dict]) -> str:
        payload = {"model": self.model, "messages": messages, "temperature": 0}
        try:
            response = self._client.post("v1/chat/completions", json=payload)
        except httpx.HTTPError as exc:
            raise LlmUnavailable(f"chat endpoint unreachable: {exc}") from exc
        if response.status_code in (429, 500, 502, 503, 504):
            retry_after = float(response.headers.get("Retry-After", 1.0))
            raise LlmUnavailable(
                f"chat endpoint returned {response.status_code}",
                retry_after_s=retry_after,
            )
        if response.status_code != 200:
            raise LlmUnavailable(f"chat endpoint returned {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise LlmUnavailable(f"malformed chat response envelope: {exc}") from exc
