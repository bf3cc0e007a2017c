"""Role-gated question lifecycle: the transition table and its interpreter.

The engine is pure: ``apply`` maps (question, action, actor roles, payload)
to a new question value plus an event description. Persistence and
optimistic-concurrency checks live in the store/service layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .domain import LifecycleState, Priority, Question, Role, now_ms
from .errors import EmptyRationale, InvalidTransition, MissingPayload, OutOfRange, RoleDenied

S = LifecycleState
R = Role


class LifecycleAction(str, Enum):
    SUBMIT = "submit"
    MARK_CLARIFIED = "mark_clarified"
    PRIORITIZE = "prioritize"
    SUBMIT_FINDINGS = "submit_findings"
    REQUEST_RESEARCH = "request_research"
    DECIDE_RESOLVED = "decide_resolved"
    DECIDE_ASSUMED = "decide_assumed"
    DECIDE_UNANSWERED = "decide_unanswered"
    MANAGE_UNCERTAINTY = "manage_uncertainty"
    ARCHIVE = "archive"
    REEMERGE = "reemerge"


DECIDE_ACTIONS = {
    LifecycleAction.DECIDE_RESOLVED,
    LifecycleAction.DECIDE_ASSUMED,
    LifecycleAction.DECIDE_UNANSWERED,
}

DECIDE_BY_OUTCOME = {
    "resolved": LifecycleAction.DECIDE_RESOLVED,
    "assumed": LifecycleAction.DECIDE_ASSUMED,
    "unanswered": LifecycleAction.DECIDE_UNANSWERED,
}


@dataclass(frozen=True)
class Transition:
    from_state: LifecycleState
    action: LifecycleAction
    to_state: LifecycleState
    allowed_roles: frozenset[Role]


def _row(frm, action, to, *roles) -> Transition:
    return Transition(frm, action, to, frozenset(roles))


# The normative table. Priority analysis is shared between the product owner
# and the question owner; every re-emergence restarts at research.
TRANSITION_TABLE: tuple[Transition, ...] = (
    _row(S.FORMULATED, LifecycleAction.SUBMIT, S.CLARIFICATION, R.QUESTION_OWNER),
    _row(S.CLARIFICATION, LifecycleAction.MARK_CLARIFIED, S.PRIORITY_ANALYSIS, R.QUESTION_OWNER),
    _row(S.PRIORITY_ANALYSIS, LifecycleAction.PRIORITIZE, S.RESEARCH, R.PRODUCT_OWNER, R.QUESTION_OWNER),
    _row(S.RESEARCH, LifecycleAction.SUBMIT_FINDINGS, S.DISCUSSION, R.DEVELOPER_RESEARCHER),
    _row(S.DISCUSSION, LifecycleAction.REQUEST_RESEARCH, S.RESEARCH,
         R.QUESTION_OWNER, R.PRODUCT_OWNER, R.DEVELOPER_RESEARCHER, R.DECISION_MAKER),
    _row(S.DISCUSSION, LifecycleAction.DECIDE_RESOLVED, S.RESOLVED, R.DECISION_MAKER),
    _row(S.DISCUSSION, LifecycleAction.DECIDE_ASSUMED, S.ASSUMED, R.DECISION_MAKER),
    _row(S.DISCUSSION, LifecycleAction.DECIDE_UNANSWERED, S.UNANSWERED, R.DECISION_MAKER),
    _row(S.UNANSWERED, LifecycleAction.MANAGE_UNCERTAINTY, S.UNCERTAINTY_MANAGEMENT, R.DECISION_MAKER),
    _row(S.RESOLVED, LifecycleAction.ARCHIVE, S.ARCHIVED, R.QUESTION_OWNER),
    _row(S.ASSUMED, LifecycleAction.ARCHIVE, S.ARCHIVED, R.QUESTION_OWNER),
    _row(S.UNCERTAINTY_MANAGEMENT, LifecycleAction.ARCHIVE, S.ARCHIVED, R.QUESTION_OWNER),
    _row(S.RESOLVED, LifecycleAction.REEMERGE, S.RESEARCH, R.PRODUCT_OWNER),
    _row(S.ASSUMED, LifecycleAction.REEMERGE, S.RESEARCH, R.PRODUCT_OWNER),
    _row(S.ARCHIVED, LifecycleAction.REEMERGE, S.RESEARCH, R.PRODUCT_OWNER),
    _row(S.UNCERTAINTY_MANAGEMENT, LifecycleAction.REEMERGE, S.RESEARCH, R.PRODUCT_OWNER),
)

_TABLE_INDEX: dict[tuple[LifecycleState, LifecycleAction], Transition] = {
    (t.from_state, t.action): t for t in TRANSITION_TABLE
}
assert len(_TABLE_INDEX) == len(TRANSITION_TABLE), "(from, action) pairs must be unique"


@dataclass(frozen=True)
class TransitionResult:
    question: Question
    transition: Transition
    # Payload slice the event log records beyond from/to/action.
    event_payload: dict


def find_transition(state: LifecycleState, action: LifecycleAction) -> Transition | None:
    return _TABLE_INDEX.get((state, action))


def allowed_actions(question: Question, roles: set[Role]) -> set[LifecycleAction]:
    """Actions the actor may apply to the question in its current state."""
    return {
        t.action
        for t in TRANSITION_TABLE
        if t.from_state == question.state and t.allowed_roles & roles
    }


def apply(
    question: Question,
    action: LifecycleAction,
    actor: str,
    roles: set[Role],
    payload: dict | None = None,
) -> TransitionResult:
    """Apply one lifecycle action, returning the updated question.

    Raises InvalidTransition when no table row matches, RoleDenied when the
    actor lacks every allowed role, MissingPayload/OutOfRange/EmptyRationale
    on bad action payloads.
    """
    payload = payload or {}
    row = find_transition(question.state, action)
    if row is None:
        raise InvalidTransition(f"no transition for ({question.state.value}, {action.value})")
    if not (row.allowed_roles & roles):
        allowed = ", ".join(sorted(r.value for r in row.allowed_roles))
        raise RoleDenied(f"{action.value} from {question.state.value} requires one of: {allowed}")

    event_payload: dict = {}
    changes: dict = {"state": row.to_state}

    if action is LifecycleAction.PRIORITIZE:
        if "urgency" not in payload or "impact" not in payload:
            raise MissingPayload("prioritize requires urgency and impact")
        try:
            urgency, impact = int(payload["urgency"]), int(payload["impact"])
        except (TypeError, ValueError):
            raise OutOfRange("urgency/impact must be integers in 1..5")
        priority = Priority(urgency, impact, assigned_by=actor, assigned_at=now_ms())
        changes["priority"] = priority
        event_payload = {
            "urgency": priority.urgency,
            "impact": priority.impact,
            "score": priority.score,
        }
    elif action in DECIDE_ACTIONS:
        if action is LifecycleAction.DECIDE_UNANSWERED:
            reason = (payload.get("reason") or payload.get("rationale") or "").strip()
            if not reason:
                raise MissingPayload("decide_unanswered requires a reason")
            event_payload = {"reason": reason}
        else:
            rationale = (payload.get("rationale") or "").strip()
            if not rationale:
                raise EmptyRationale("a resolved/assumed decision requires a rationale")
            event_payload = {"rationale": rationale}

    return TransitionResult(question.bump(**changes), row, event_payload)


def reachable_terminal(table: tuple[Transition, ...] = TRANSITION_TABLE) -> bool:
    """True iff Archived is reachable from every state appearing in the table."""
    states = {t.from_state for t in table} | {t.to_state for t in table}
    if not states:
        return True
    edges: dict[LifecycleState, set[LifecycleState]] = {}
    for t in table:
        edges.setdefault(t.from_state, set()).add(t.to_state)
    for start in states:
        frontier, seen = [start], {start}
        while frontier:
            node = frontier.pop()
            for nxt in edges.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if S.ARCHIVED not in seen:
            return False
    return True


def table_rows() -> list[dict]:
    """Machine-readable table for GET /lifecycle/table."""
    return [
        {
            "from": t.from_state.value,
            "action": t.action.value,
            "to": t.to_state.value,
            "roles": sorted(r.value for r in t.allowed_roles),
        }
        for t in TRANSITION_TABLE
    ]
