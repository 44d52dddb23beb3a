"""HTTP chat-completions client: schema checks, repair loop, failure mapping."""

from __future__ import annotations

import json

import httpx
import pytest

from bimnav.agents import CandidateSet, RankedCandidate, StructuredTarget
from bimnav.agents.llm import MAX_REPAIR_ROUNDS, HttpLlmClient, load_prompt
from bimnav.errors import LlmUnavailable, UnparseableLlmOutput
from bimnav.ingest import BimEntity, IfcClass

BASE = "http://llm.test"


def _client(handler):
    transport = httpx.MockTransport(handler)
    return HttpLlmClient(BASE, client=httpx.Client(transport=transport, base_url=BASE))


def _chat(content, status=200):
    return httpx.Response(status, json={"choices": [{"message": {"content": content}}]})


def _recording(replies):
    """Handler that pops canned replies and keeps the decoded requests."""
    requests: list[dict] = []

    def handler(request: httpx.Request) -> httpx.Response:
        requests.append(json.loads(request.content))
        return replies.pop(0)

    return handler, requests


def _candidate_set():
    entity = BimEntity(
        id="coffee_shop",
        ifc_class=IfcClass.SPACE,
        name="Coffee Shop",
        description="espresso bar",
        position=(12.0, 0.0, 16.0),
    )
    target = StructuredTarget(
        kind="explicit", semantics=("coffee", "shop"), description="the coffee shop"
    )
    return CandidateSet(
        target=target,
        candidates=(RankedCandidate(entity=entity, similarity=0.91, distance_m=4.2),),
    )


TRIAGE_OK = json.dumps(
    {
        "category": "navigation",
        "targets": [
            {
                "kind": "explicit",
                "semantics": ["coffee", "shop"],
                "description": "the coffee shop",
                "qualifier": "nearest",
            }
        ],
        "inquiry_topic": None,
    }
)

SELECT_OK = json.dumps(
    {
        "selected_id": "coffee_shop",
        "rationale": "only match",
        "needs_clarification": False,
        "clarification_question": None,
    }
)


# --- happy paths -------------------------------------------------------------


def test_triage_parses_schema_checked_json():
    handler, requests = _recording([_chat(TRIAGE_OK)])
    result = _client(handler).triage("take me to the nearest coffee shop", history=())
    assert result.category == "navigation"
    assert len(result.targets) == 1
    assert result.targets[0].semantics == ("coffee", "shop")
    assert result.targets[0].qualifier == "nearest"
    assert result.inquiry_topic is None
    assert len(requests) == 1


def test_request_envelope_is_deterministic_chat_completions():
    handler, requests = _recording([_chat(TRIAGE_OK)])
    client = _client(handler)
    client.triage("take me to the coffee shop", history=())
    payload = requests[0]
    assert payload["model"] == "guide-chat"
    assert payload["temperature"] == 0
    assert payload["messages"][0]["role"] == "user"
    assert "take me to the coffee shop" in payload["messages"][0]["content"]


def test_post_targets_chat_completions_path():
    seen = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request.url.path)
        return _chat(TRIAGE_OK)

    _client(handler).triage("hello", history=())
    assert seen == ["/v1/chat/completions"]


def test_code_fences_are_stripped():
    handler, _ = _recording([_chat(f"```json\n{TRIAGE_OK}\n```")])
    result = _client(handler).triage("take me to the coffee shop", history=())
    assert result.category == "navigation"


def test_select_parses_decision():
    handler, requests = _recording([_chat(SELECT_OK)])
    decision = _client(handler).select(_candidate_set())
    assert decision.selected_id == "coffee_shop"
    assert decision.rationale == "only match"
    assert not decision.needs_clarification
    # the shortlist is laid out as one row per candidate
    prompt = requests[0]["messages"][0]["content"]
    assert "coffee_shop | Coffee Shop | espresso bar" in prompt


def test_compose_returns_stripped_text_or_none():
    handler, _ = _recording([_chat("  Right this way.  ")])
    assert _client(handler).compose("hi", "greeting", "(no destination facts)") == "Right this way."
    handler, _ = _recording([_chat("   ")])
    assert _client(handler).compose("hi", "greeting", "(no destination facts)") is None


# --- repair loop -------------------------------------------------------------


def test_bad_json_is_repaired_once():
    handler, requests = _recording([_chat("not json at all"), _chat(TRIAGE_OK)])
    result = _client(handler).triage("take me to the coffee shop", history=())
    assert result.category == "navigation"
    assert len(requests) == 2
    # the re-prompt carries the rejected answer plus the validator complaint
    messages = requests[1]["messages"]
    assert len(messages) == 3
    assert messages[1] == {"role": "assistant", "content": "not json at all"}
    assert messages[2]["role"] == "user"
    assert "rejected" in messages[2]["content"]


def test_schema_violations_are_repaired_like_bad_json():
    wrong_shape = json.dumps({"category": "party"})
    handler, requests = _recording([_chat(wrong_shape), _chat(TRIAGE_OK)])
    result = _client(handler).triage("take me to the coffee shop", history=())
    assert result.category == "navigation"
    assert len(requests) == 2


def test_repair_budget_is_bounded():
    handler, requests = _recording([_chat("nope")] * (1 + MAX_REPAIR_ROUNDS + 5))
    with pytest.raises(UnparseableLlmOutput):
        _client(handler).triage("take me to the coffee shop", history=())
    assert len(requests) == 1 + MAX_REPAIR_ROUNDS


# --- failure mapping ---------------------------------------------------------


def test_retry_after_header_is_surfaced():
    handler, _ = _recording([httpx.Response(503, headers={"Retry-After": "7"})])
    with pytest.raises(LlmUnavailable) as exc_info:
        _client(handler).triage("hello", history=())
    assert exc_info.value.retry_after_s == 7.0


@pytest.mark.parametrize("status", [429, 500, 502, 503, 504])
def test_backend_pressure_maps_to_unavailable(status):
    handler, _ = _recording([httpx.Response(status)])
    with pytest.raises(LlmUnavailable):
        _client(handler).triage("hello", history=())


def test_other_non_200_maps_to_unavailable():
    handler, _ = _recording([httpx.Response(404)])
    with pytest.raises(LlmUnavailable):
        _client(handler).triage("hello", history=())


def test_transport_errors_map_to_unavailable():
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("connection refused", request=request)

    with pytest.raises(LlmUnavailable):
        _client(handler).triage("hello", history=())


@pytest.mark.parametrize(
    "body",
    [
        {"choices": []},
        {"choices": [{"message": {}}]},
        {"unexpected": True},
    ],
)
def test_malformed_envelope_maps_to_unavailable(body):
    handler, _ = _recording([httpx.Response(200, json=body)])
    with pytest.raises(LlmUnavailable):
        _client(handler).triage("hello", history=())


def test_non_json_200_body_maps_to_unavailable():
    handler, _ = _recording([httpx.Response(200, text="<html>gateway</html>")])
    with pytest.raises(LlmUnavailable):
        _client(handler).triage("hello", history=())


# --- packaged prompts --------------------------------------------------------


@pytest.mark.parametrize(
    ("name", "placeholder"),
    [
        ("triage", "{utterance}"),
        ("select", "{candidates}"),
        ("respond", "{facts}"),
    ],
)
def test_prompts_ship_with_the_package(name, placeholder):
    text = load_prompt(name)
    assert placeholder in text
