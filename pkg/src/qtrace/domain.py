"""Shared domain types: questions, lifecycle states, roles, priority, attachments."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum

from .errors import EmptyTitle, OutOfRange
from .ids import new_id

MAX_TITLE_LEN = 200


class Role(str, Enum):
    QUESTION_OWNER = "question_owner"
    PRODUCT_OWNER = "product_owner"
    DEVELOPER_RESEARCHER = "developer_researcher"
    DECISION_MAKER = "decision_maker"
    # Admin manages users only; it never gates a lifecycle transition.
    ADMIN = "admin"


class LifecycleState(str, Enum):
    FORMULATED = "formulated"
    CLARIFICATION = "clarification"
    PRIORITY_ANALYSIS = "priority_analysis"
    RESEARCH = "research"
    DISCUSSION = "discussion"
    RESOLVED = "resolved"
    ASSUMED = "assumed"
    UNANSWERED = "unanswered"
    UNCERTAINTY_MANAGEMENT = "uncertainty_management"
    ARCHIVED = "archived"


class BacklogStatus(str, Enum):
    ACTIVE = "active"
    RESOLVED = "resolved"
    ASSUMED = "assumed"
    ARCHIVED = "archived"


class VisibilityLevel(str, Enum):
    """Ordered clearance tiers: Public < Team < Restricted."""

    PUBLIC = "public"
    TEAM = "team"
    RESTRICTED = "restricted"

    @property
    def rank(self) -> int:
        return _VISIBILITY_RANK[self]


_VISIBILITY_RANK = {
    VisibilityLevel.PUBLIC: 0,
    VisibilityLevel.TEAM: 1,
    VisibilityLevel.RESTRICTED: 2,
}

_STATUS_BY_STATE = {
    LifecycleState.FORMULATED: BacklogStatus.ACTIVE,
    LifecycleState.CLARIFICATION: BacklogStatus.ACTIVE,
    LifecycleState.PRIORITY_ANALYSIS: BacklogStatus.ACTIVE,
    LifecycleState.RESEARCH: BacklogStatus.ACTIVE,
    LifecycleState.DISCUSSION: BacklogStatus.ACTIVE,
    LifecycleState.UNANSWERED: BacklogStatus.ACTIVE,
    LifecycleState.UNCERTAINTY_MANAGEMENT: BacklogStatus.ACTIVE,
    LifecycleState.RESOLVED: BacklogStatus.RESOLVED,
    LifecycleState.ASSUMED: BacklogStatus.ASSUMED,
    LifecycleState.ARCHIVED: BacklogStatus.ARCHIVED,
}


def derive_status(state: LifecycleState) -> BacklogStatus:
    """Map a lifecycle state to its backlog bucket (total function)."""
    return _STATUS_BY_STATE[state]


@dataclass(frozen=True)
class Priority:
    urgency: int
    impact: int
    assigned_by: str
    assigned_at: int

    def __post_init__(self):
        if not (1 <= self.urgency <= 5 and 1 <= self.impact <= 5):
            raise OutOfRange(f"urgency/impact must be in 1..5, got ({self.urgency}, {self.impact})")

    @property
    def score(self) -> int:
        return self.urgency * self.impact


@dataclass(frozen=True)
class Attachment:
    id: str
    filename: str
    media_type: str
    byte_size: int
    content_hash: str
    extracted_text: str | None = None


@dataclass(frozen=True)
class Comment:
    id: str
    question_id: str
    author: str
    body: str
    posted_at: int
    state_at_posting: LifecycleState


@dataclass(frozen=True)
class Question:
    id: str
    title: str
    body: str
    author: str
    created_at: int
    state: LifecycleState
    visibility: VisibilityLevel
    priority: Priority | None = None
    categories: frozenset[str] = frozenset()
    tags: frozenset[str] = frozenset()
    attachments: tuple[Attachment, ...] = ()
    watchers: frozenset[str] = frozenset()
    version: int = 1

    @property
    def status(self) -> BacklogStatus:
        return derive_status(self.state)

    def bump(self, **changes) -> "Question":
        """Return a copy with the given changes and version incremented by 1."""
        return replace(self, version=self.version + 1, **changes)


class DecisionOutcome(str, Enum):
    RESOLVED = "resolved"
    ASSUMED = "assumed"
    DEFERRED = "deferred"


@dataclass(frozen=True)
class DecisionRecord:
    id: str
    question_id: str
    outcome: DecisionOutcome
    chosen_option: str
    considered_options: tuple[str, ...]
    rationale: str
    contributors: frozenset[str]
    decided_by: str
    decided_at: int
    supersedes: str | None = None


def now_ms() -> int:
    return time.time_ns() // 1_000_000


def new_question(
    author: str,
    title: str,
    body: str,
    visibility: VisibilityLevel = VisibilityLevel.TEAM,
    *,
    tags: frozenset[str] = frozenset(),
    question_id: str | None = None,
    created_at: int | None = None,
) -> Question:
    """Create a freshly formulated question owned and watched by its author.

    Existence of ``author`` is the caller's responsibility (the service layer
    checks it against the user registry and raises UnknownUser).
    """
    # Titles are single-line: collapse internal whitespace runs.
    title = " ".join(title.split())
    if not title:
        raise EmptyTitle("title must be non-empty after trimming")
    if len(title) > MAX_TITLE_LEN:
        raise EmptyTitle(f"title exceeds {MAX_TITLE_LEN} characters")
    created = created_at if created_at is not None else now_ms()
    return Question(
        id=question_id or new_id(created),
        title=title,
        body=body,
        author=author,
        created_at=created,
        state=LifecycleState.FORMULATED,
        visibility=visibility,
        tags=tags,
        watchers=frozenset({author}),
    )
