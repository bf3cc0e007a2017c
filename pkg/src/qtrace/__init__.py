"""qtrace: capture, track, and preserve natural questions from
software-architecture work."""

from .domain import (
    BacklogStatus,
    DecisionOutcome,
    DecisionRecord,
    LifecycleState,
    Priority,
    Question,
    Role,
    VisibilityLevel,
    derive_status,
    new_question,
)
from .lifecycle import TRANSITION_TABLE, LifecycleAction, allowed_actions, apply, reachable_terminal
from .service import QuestionService, ServiceConfig

__version__ = "0.1.0"

__all__ = [
    "BacklogStatus",
    "DecisionOutcome",
    "DecisionRecord",
    "LifecycleAction",
    "LifecycleState",
    "Priority",
    "Question",
    "QuestionService",
    "Role",
    "ServiceConfig",
    "TRANSITION_TABLE",
    "VisibilityLevel",
    "allowed_actions",
    "apply",
    "derive_status",
    "new_question",
    "reachable_terminal",
    "__version__",
]
