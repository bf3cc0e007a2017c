"""Event-sourced system of record: hash-chained append-only log, replayable
snapshots, backlog queries, and conjunctive keyword search.

Log file format (bit-exact): for each event, a 4-byte big-endian length
prefix followed by the canonical JSON serialization of the event (sorted
keys, compact separators, ASCII-escaped, UTF-8 bytes). The event hash is
SHA-256 over (prev_hash || canonical serialization of the event minus its
hash field), hex-encoded.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

from .classification import backlog_sort_key, tokenize
from .domain import (
    Attachment,
    BacklogStatus,
    Comment,
    DecisionOutcome,
    DecisionRecord,
    LifecycleState,
    Priority,
    Question,
    VisibilityLevel,
    derive_status,
)
from .errors import ChainBroken, EmptyQuery, HashMismatch, IntegrityViolation, UnknownEventKind

GENESIS_HASH = "0" * 64

EVENT_KINDS = frozenset(
    {
        "created",
        "transitioned",
        "commented",
        "prioritized",
        "categorized",
        "attached",
        "watched",
        "decision_recorded",
    }
)


@dataclass(frozen=True)
class Event:
    seq: int
    question_id: str
    actor: str
    kind: str
    payload: dict
    at: int
    prev_hash: str
    hash: str


def canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("utf-8")


def _event_dict(event: Event, with_hash: bool) -> dict:
    d = {
        "seq": event.seq,
        "question_id": event.question_id,
        "actor": event.actor,
        "kind": event.kind,
        "payload": event.payload,
        "at": event.at,
        "prev_hash": event.prev_hash,
    }
    if with_hash:
        d["hash"] = event.hash
    return d


def event_hash(event: Event) -> str:
    body = canonical_bytes(_event_dict(event, with_hash=False))
    return hashlib.sha256(event.prev_hash.encode("ascii") + body).hexdigest()


def seal(event: Event) -> Event:
    return replace(event, hash=event_hash(event))


def event_bytes(event: Event) -> bytes:
    return canonical_bytes(_event_dict(event, with_hash=True))


def event_from_dict(d: dict) -> Event:
    try:
        return Event(
            seq=d["seq"],
            question_id=d["question_id"],
            actor=d["actor"],
            kind=d["kind"],
            payload=d["payload"],
            at=d["at"],
            prev_hash=d["prev_hash"],
            hash=d["hash"],
        )
    except KeyError as exc:
        raise ChainBroken(f"event missing field {exc}")


def verify_chain(events: Iterable[Event]) -> None:
    """Raise ChainBroken unless seq is gapless from 1 and hashes link up."""
    prev_hash = GENESIS_HASH
    expected_seq = 1
    for event in events:
        if event.seq != expected_seq:
            raise ChainBroken(f"seq gap: expected {expected_seq}, got {event.seq}")
        if event.prev_hash != prev_hash:
            raise ChainBroken(f"prev_hash mismatch at seq {event.seq}")
        if event.kind not in EVENT_KINDS:
            raise UnknownEventKind(event.kind)
        if event_hash(event) != event.hash:
            raise ChainBroken(f"hash mismatch at seq {event.seq}")
        prev_hash = event.hash
        expected_seq += 1


# --- Snapshot ---------------------------------------------------------------

@dataclass
class StoreSnapshot:
    questions: dict[str, Question]
    comments: dict[str, tuple[Comment, ...]]
    decisions: dict[str, DecisionRecord]
    decisions_by_question: dict[str, tuple[str, ...]]
    doc_freq: dict[str, int]
    index: dict[str, set[str]]
    doc_tokens: dict[str, tuple[str, ...]]
    last_seq: int
    last_hash: str

    @classmethod
    def empty(cls) -> "StoreSnapshot":
        return cls({}, {}, {}, {}, {}, {}, {}, 0, GENESIS_HASH)


def question_tokens(snapshot: StoreSnapshot, question: Question) -> list[str]:
    """Indexed text of a question: title, body, comments, attachment sidecars."""
    parts = [question.title, question.body]
    for comment in snapshot.comments.get(question.id, ()):
        parts.append(comment.body)
    for att in question.attachments:
        if att.extracted_text:
            parts.append(att.extracted_text)
    return tokenize("\n".join(parts))


def _reindex(snapshot: StoreSnapshot, question: Question) -> None:
    old = set(snapshot.doc_tokens.get(question.id, ()))
    tokens = question_tokens(snapshot, question)
    new = set(tokens)
    for term in old - new:
        snapshot.doc_freq[term] -= 1
        if snapshot.doc_freq[term] == 0:
            del snapshot.doc_freq[term]
        bucket = snapshot.index[term]
        bucket.discard(question.id)
        if not bucket:
            del snapshot.index[term]
    for term in new - old:
        snapshot.doc_freq[term] = snapshot.doc_freq.get(term, 0) + 1
        snapshot.index.setdefault(term, set()).add(question.id)
    snapshot.doc_tokens[question.id] = tuple(tokens)


def fold_event(snapshot: StoreSnapshot, event: Event) -> None:
    """Apply one event to the snapshot in place. Every event about a question
    increments its version by exactly 1 (created sets it to 1)."""
    p = event.payload
    if event.kind == "created":
        question = Question(
            id=event.question_id,
            title=p["title"],
            body=p["body"],
            author=event.actor,
            created_at=event.at,
            state=LifecycleState.FORMULATED,
            visibility=VisibilityLevel(p["visibility"]),
            tags=frozenset(p.get("tags", ())),
            watchers=frozenset({event.actor}),
        )
        snapshot.questions[question.id] = question
        _reindex(snapshot, question)
    else:
        question = snapshot.questions.get(event.question_id)
        if question is None:
            raise IntegrityViolation(f"event {event.seq} references unknown question")
        if event.kind == "transitioned":
            question = question.bump(state=LifecycleState(p["to"]))
        elif event.kind == "prioritized":
            priority = Priority(p["urgency"], p["impact"], assigned_by=event.actor, assigned_at=event.at)
            question = question.bump(state=LifecycleState(p["to"]), priority=priority)
        elif event.kind == "commented":
            comment = Comment(
                id=p["comment_id"],
                question_id=question.id,
                author=event.actor,
                body=p["body"],
                posted_at=event.at,
                state_at_posting=question.state,
            )
            snapshot.comments[question.id] = snapshot.comments.get(question.id, ()) + (comment,)
            question = question.bump()
        elif event.kind == "categorized":
            question = question.bump(categories=frozenset(p["categories"]))
        elif event.kind == "attached":
            att = Attachment(
                id=p["attachment_id"],
                filename=p["filename"],
                media_type=p["media_type"],
                byte_size=p["byte_size"],
                content_hash=p["content_hash"],
                extracted_text=p.get("extracted_text"),
            )
            question = question.bump(attachments=question.attachments + (att,))
        elif event.kind == "watched":
            watchers = set(question.watchers)
            if p["op"] == "watch":
                watchers.add(p["user"])
            else:
                watchers.discard(p["user"])
            question = question.bump(watchers=frozenset(watchers))
        elif event.kind == "decision_recorded":
            record = DecisionRecord(
                id=p["decision_id"],
                question_id=question.id,
                outcome=DecisionOutcome(p["outcome"]),
                chosen_option=p["chosen_option"],
                considered_options=tuple(p["considered_options"]),
                rationale=p["rationale"],
                contributors=frozenset(p["contributors"]),
                decided_by=event.actor,
                decided_at=event.at,
                supersedes=p.get("supersedes"),
            )
            snapshot.decisions[record.id] = record
            snapshot.decisions_by_question[question.id] = (
                snapshot.decisions_by_question.get(question.id, ()) + (record.id,)
            )
            question = question.bump()
        else:
            raise UnknownEventKind(event.kind)
        snapshot.questions[question.id] = question
        if event.kind in ("commented", "attached"):
            _reindex(snapshot, question)
    snapshot.last_seq = event.seq
    snapshot.last_hash = event.hash


def replay(events: Iterable[Event]) -> StoreSnapshot:
    """Fold a verified event chain into a snapshot (pure, deterministic)."""
    events = list(events)
    verify_chain(events)
    snapshot = StoreSnapshot.empty()
    for event in events:
        fold_event(snapshot, event)
    return snapshot


def snapshot_bytes(snapshot: StoreSnapshot) -> bytes:
    """Canonical serialization of a snapshot, for determinism checks."""

    def q_dict(q: Question) -> dict:
        return {
            "id": q.id,
            "title": q.title,
            "body": q.body,
            "author": q.author,
            "created_at": q.created_at,
            "state": q.state.value,
            "visibility": q.visibility.value,
            "priority": None
            if q.priority is None
            else {
                "urgency": q.priority.urgency,
                "impact": q.priority.impact,
                "score": q.priority.score,
                "assigned_by": q.priority.assigned_by,
                "assigned_at": q.priority.assigned_at,
            },
            "categories": sorted(q.categories),
            "tags": sorted(q.tags),
            "attachments": [
                {
                    "id": a.id,
                    "filename": a.filename,
                    "media_type": a.media_type,
                    "byte_size": a.byte_size,
                    "content_hash": a.content_hash,
                    "extracted_text": a.extracted_text,
                }
                for a in q.attachments
            ],
            "watchers": sorted(q.watchers),
            "version": q.version,
        }

    doc = {
        "questions": {qid: q_dict(q) for qid, q in snapshot.questions.items()},
        "comments": {
            qid: [
                {
                    "id": c.id,
                    "author": c.author,
                    "body": c.body,
                    "posted_at": c.posted_at,
                    "state_at_posting": c.state_at_posting.value,
                }
                for c in comments
            ]
            for qid, comments in snapshot.comments.items()
            if comments
        },
        "decisions": {
            did: {
                "question_id": r.question_id,
                "outcome": r.outcome.value,
                "chosen_option": r.chosen_option,
                "considered_options": list(r.considered_options),
                "rationale": r.rationale,
                "contributors": sorted(r.contributors),
                "decided_by": r.decided_by,
                "decided_at": r.decided_at,
                "supersedes": r.supersedes,
            }
            for did, r in snapshot.decisions.items()
        },
        "doc_freq": snapshot.doc_freq,
        "index": {term: sorted(ids) for term, ids in snapshot.index.items()},
        "last_seq": snapshot.last_seq,
        "last_hash": snapshot.last_hash,
    }
    return canonical_bytes(doc)


# --- Queries ----------------------------------------------------------------

@dataclass(frozen=True)
class SearchQuery:
    keywords: tuple[str, ...] = ()
    status: BacklogStatus | None = None
    state: LifecycleState | None = None
    category: str | None = None
    min_score: int | None = None

    def is_empty(self) -> bool:
        return not (
            self.keywords
            or self.status
            or self.state
            or self.category
            or self.min_score is not None
        )


def _matches_filters(question: Question, query: SearchQuery) -> bool:
    if query.status is not None and derive_status(question.state) != query.status:
        return False
    if query.state is not None and question.state != query.state:
        return False
    if query.category is not None and query.category not in question.categories:
        return False
    if query.min_score is not None:
        if question.priority is None or question.priority.score < query.min_score:
            return False
    return True


def search(
    snapshot: StoreSnapshot,
    query: SearchQuery,
    visible: Callable[[Question], bool] = lambda q: True,
) -> list[tuple[str, tuple[str, ...]]]:
    """Conjunctive keyword search intersected with filters, visibility-scoped.

    Returns (question_id, matched keywords) ordered by the priority
    comparator, then recency.
    """
    if query.is_empty():
        raise EmptyQuery("search needs at least one keyword or filter")
    if query.keywords:
        candidate_ids: set[str] | None = None
        for keyword in query.keywords:
            bucket = snapshot.index.get(keyword, set())
            candidate_ids = bucket.copy() if candidate_ids is None else candidate_ids & bucket
            if not candidate_ids:
                return []
        assert candidate_ids is not None
    else:
        candidate_ids = set(snapshot.questions)

    hits = [
        q
        for qid in candidate_ids
        if (q := snapshot.questions[qid]) and _matches_filters(q, query) and visible(q)
    ]
    hits.sort(key=backlog_sort_key)
    return [(q.id, tuple(query.keywords)) for q in hits]


def backlog(
    snapshot: StoreSnapshot,
    status: BacklogStatus | None = None,
    category: str | None = None,
    min_score: int | None = None,
    visible: Callable[[Question], bool] = lambda q: True,
) -> list[Question]:
    """Backlog listing ordered by the priority comparator; unprioritized
    questions sort after prioritized ones, newest first."""
    rows = [
        q
        for q in snapshot.questions.values()
        if visible(q)
        and (status is None or derive_status(q.state) == status)
        and (category is None or category in q.categories)
        and (min_score is None or (q.priority is not None and q.priority.score >= min_score))
    ]
    rows.sort(key=backlog_sort_key)
    return rows


# --- Durable store ----------------------------------------------------------

_LEN = struct.Struct(">I")


class EventStore:
    """Append-only durable event log with an incrementally maintained snapshot.

    Single writer (guarded by a lock), any number of readers. ``append``
    flushes and fsyncs before returning.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.log_path = self.directory / "events.log"
        self._lock = threading.Lock()
        self._hooks: list[Callable[[Event, StoreSnapshot], None]] = []
        events = list(self._read_log())
        verify_chain(events)
        self.events: list[Event] = events
        self.snapshot = StoreSnapshot.empty()
        for event in events:
            fold_event(self.snapshot, event)
        self._fh = open(self.log_path, "ab")

    def close(self) -> None:
        self._fh.close()

    def _read_log(self) -> Iterable[Event]:
        if not self.log_path.exists():
            return
        with open(self.log_path, "rb") as fh:
            while True:
                header = fh.read(4)
                if not header:
                    return
                if len(header) < 4:
                    raise ChainBroken("truncated length prefix")
                (length,) = _LEN.unpack(header)
                body = fh.read(length)
                if len(body) < length:
                    raise ChainBroken("truncated event record")
                try:
                    yield event_from_dict(json.loads(body))
                except (ValueError, UnicodeDecodeError):
                    raise ChainBroken("undecodable event record")

    def add_hook(self, hook: Callable[[Event, StoreSnapshot], None]) -> None:
        """Called after each durable append (notification fan-out)."""
        self._hooks.append(hook)

    @property
    def last_seq(self) -> int:
        return self.snapshot.last_seq

    @property
    def last_hash(self) -> str:
        return self.snapshot.last_hash

    def _write_locked(self, event: Event) -> None:
        record = event_bytes(event)
        self._fh.write(_LEN.pack(len(record)) + record)
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self.events.append(event)
        fold_event(self.snapshot, event)

    def append(self, event: Event) -> int:
        """Append a sealed event; its prev_hash must equal the current head."""
        with self._lock:
            if event.prev_hash != self.snapshot.last_hash:
                raise HashMismatch("stale prev_hash: concurrent writer or broken chain")
            if event.seq != self.snapshot.last_seq + 1:
                raise IntegrityViolation(f"expected seq {self.snapshot.last_seq + 1}, got {event.seq}")
            if event_hash(event) != event.hash:
                raise IntegrityViolation("event hash does not match its content")
            self._write_locked(event)
        for hook in self._hooks:
            hook(event, self.snapshot)
        return event.seq

    def emit(self, kind: str, question_id: str, actor: str, payload: dict, at: int) -> Event:
        """Build, seal, and append the next event in the chain."""
        with self._lock:
            event = seal(
                Event(
                    seq=self.snapshot.last_seq + 1,
                    question_id=question_id,
                    actor=actor,
                    kind=kind,
                    payload=payload,
                    at=at,
                    prev_hash=self.snapshot.last_hash,
                    hash="",
                )
            )
            self._write_locked(event)
        for hook in self._hooks:
            hook(event, self.snapshot)
        return event
