"""Query understanding: triage, goal retrieval and reply composition."""

from .llm import HttpLlmClient, LlmClient, RuleBasedLlmClient, load_prompt
from .orchestrator import (
    DEFAULT_TOP_N,
    SearchContext,
    annotate_distances,
    euclidean_distance,
    handle_query,
    respond,
    retrieve_goal,
    route_distance_fn,
    triage,
)
from .rules import NEED_KEYWORDS, build_target, content_tokens, select_rules, tokenize, triage_rules
from .types import (
    AgentResponse,
    CandidateSet,
    Category,
    DialogueState,
    Exchange,
    GoalSelection,
    RankedCandidate,
    SelectionDecision,
    StructuredTarget,
    TriageResult,
    UserQuery,
)

__all__ = [
    "DEFAULT_TOP_N",
    "NEED_KEYWORDS",
    "AgentResponse",
    "CandidateSet",
    "Category",
    "DialogueState",
    "Exchange",
    "GoalSelection",
    "HttpLlmClient",
    "LlmClient",
    "RankedCandidate",
    "RuleBasedLlmClient",
    "SearchContext",
    "SelectionDecision",
    "StructuredTarget",
    "TriageResult",
    "UserQuery",
    "annotate_distances",
    "build_target",
    "content_tokens",
    "euclidean_distance",
    "handle_query",
    "load_prompt",
    "respond",
    "retrieve_goal",
    "route_distance_fn",
    "select_rules",
    "tokenize",
    "triage",
    "triage_rules",
]
