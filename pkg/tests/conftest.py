import json
import sys
from pathlib import Path

import pytest

from qtrace.domain import Role, VisibilityLevel
from qtrace.lifecycle import LifecycleAction
from qtrace.service import QuestionService, ServiceConfig

FIXTURES = Path(__file__).parent / "fixtures"

# One user per lifecycle role plus an admin and a low-clearance reader.
STANDARD_USERS = [
    ("owner", {Role.QUESTION_OWNER}, VisibilityLevel.TEAM),
    ("po", {Role.PRODUCT_OWNER}, VisibilityLevel.TEAM),
    ("dev", {Role.DEVELOPER_RESEARCHER}, VisibilityLevel.TEAM),
    ("dm", {Role.DECISION_MAKER}, VisibilityLevel.RESTRICTED),
    ("root", {Role.ADMIN}, VisibilityLevel.RESTRICTED),
    ("pub", {Role.DEVELOPER_RESEARCHER}, VisibilityLevel.PUBLIC),
]


@pytest.fixture
def service(tmp_path) -> QuestionService:
    svc = QuestionService(ServiceConfig(store_dir=str(tmp_path / "store")))
    for user_id, roles, clearance in STANDARD_USERS:
        svc.add_user(None, user_id, user_id.title(), roles, clearance, token=f"token-{user_id}")
    return svc


@pytest.fixture
def sim_corpus() -> list[dict]:
    return json.loads((FIXTURES / "sim_corpus.json").read_text("utf-8"))


@pytest.fixture
def transcript_text() -> str:
    return (FIXTURES / "transcript_01.txt").read_text("utf-8")


def pytest_terminal_summary(terminalreporter):
    """Echo one pass/fail line per release criterion after the run."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def drive_to_discussion(svc: QuestionService, question_id: str) -> None:
    svc.transition("owner", question_id, LifecycleAction.SUBMIT)
    svc.transition("owner", question_id, LifecycleAction.MARK_CLARIFIED)
    svc.transition("po", question_id, LifecycleAction.PRIORITIZE, {"urgency": 3, "impact": 4})
    svc.transition("dev", question_id, LifecycleAction.SUBMIT_FINDINGS)


def decide(svc: QuestionService, question_id: str, outcome: str, rationale="because") -> None:
    action = {
        "resolved": LifecycleAction.DECIDE_RESOLVED,
        "assumed": LifecycleAction.DECIDE_ASSUMED,
        "unanswered": LifecycleAction.DECIDE_UNANSWERED,
    }[outcome]
    payload = {"rationale": rationale, "reason": rationale, "chosen_option": "option-a",
               "considered_options": ["option-a", "option-b"]}
    svc.transition("dm", question_id, action, payload)
