import pytest

from qtrace.domain import (
    BacklogStatus,
    LifecycleState,
    Priority,
    VisibilityLevel,
    derive_status,
    new_question,
)
from qtrace.errors import EmptyTitle, OutOfRange
from qtrace.ids import id_timestamp_ms, is_valid_id, new_id

ACTIVE_STATES = {
    LifecycleState.FORMULATED,
    LifecycleState.CLARIFICATION,
    LifecycleState.PRIORITY_ANALYSIS,
    LifecycleState.RESEARCH,
    LifecycleState.DISCUSSION,
    LifecycleState.UNANSWERED,
    LifecycleState.UNCERTAINTY_MANAGEMENT,
}


def test_derive_status_mapping():
    for state in ACTIVE_STATES:
        assert derive_status(state) == BacklogStatus.ACTIVE
    assert derive_status(LifecycleState.RESOLVED) == BacklogStatus.RESOLVED
    assert derive_status(LifecycleState.ASSUMED) == BacklogStatus.ASSUMED
    assert derive_status(LifecycleState.ARCHIVED) == BacklogStatus.ARCHIVED


def test_derive_status_total_and_surjective():
    images = {derive_status(s) for s in LifecycleState}
    assert images == set(BacklogStatus)


def test_new_question_defaults():
    q = new_question("u1", "Which persistence model?", "details", VisibilityLevel.TEAM)
    assert q.state == LifecycleState.FORMULATED
    assert q.version == 1
    assert q.priority is None
    assert q.categories == frozenset()
    assert q.watchers == {"u1"}
    assert is_valid_id(q.id)


def test_new_question_empty_title():
    with pytest.raises(EmptyTitle):
        new_question("u1", "   ", "body", VisibilityLevel.PUBLIC)


def test_new_question_title_too_long():
    with pytest.raises(EmptyTitle):
        new_question("u1", "x" * 201, "", VisibilityLevel.PUBLIC)


def test_priority_score_bounds():
    assert Priority(5, 5, "u", 0).score == 25
    assert Priority(1, 1, "u", 0).score == 1
    with pytest.raises(OutOfRange):
        Priority(0, 3, "u", 0)
    with pytest.raises(OutOfRange):
        Priority(3, 6, "u", 0)


def test_visibility_order():
    assert VisibilityLevel.PUBLIC.rank < VisibilityLevel.TEAM.rank < VisibilityLevel.RESTRICTED.rank


def test_version_bump():
    q = new_question("u1", "T?", "b")
    assert q.bump().version == 2
    assert q.bump().bump().version == 3


def test_id_uniqueness_and_monotonicity():
    # 10^6 draws: no duplicates; lexical order consistent with timestamps.
    n = 1_000_000
    ids = [new_id(ts_ms=1_700_000_000_000 + (i // 10)) for i in range(n)]
    assert len(set(ids)) == n
    stamps = [id_timestamp_ms(i) for i in sorted(ids)]
    assert stamps == sorted(stamps)


def test_id_timestamp_roundtrip():
    ts = 1_700_000_123_456
    assert id_timestamp_ms(new_id(ts)) == ts
