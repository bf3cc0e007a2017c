"""Orchestration layer: wires the lifecycle engine, event store, access
control, classification, and ingestion behind one object the HTTP API and
benchmarks call directly."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import access, classification, lifecycle, traceability
from .access import NotificationCenter, UserRegistry, authorize, can_read
from .classification import (
    CategoryTaxonomy,
    SimilarityReport,
    flag_ambiguity,
    rank_neighbors,
    recommend,
    similarity,
    tokenize,
)
from .domain import (
    BacklogStatus,
    Comment,
    DecisionOutcome,
    LifecycleState,
    Question,
    Role,
    VisibilityLevel,
    new_question,
    now_ms,
)
from .errors import (
    Forbidden,
    RoleDenied,
    StaleVersion,
    UnknownQuestion,
    UnknownUser,
)
from .ids import new_id
from .ingestion import BlobStore, DraftQuestion, extract_questions, parse_transcript
from .lifecycle import DECIDE_ACTIONS, LifecycleAction
from .store import EventStore, SearchQuery, backlog, search
from .traceability import export_adr

DEFAULT_SIMILARITY_THRESHOLD = 0.35
DEFAULT_NEIGHBORS = 5


@dataclass
class ServiceConfig:
    store_dir: str
    users_file: str | None = None
    taxonomy_file: str | None = None
    catalog_file: str | None = None
    stopwords_file: str | None = None
    vague_terms_file: str | None = None
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    max_attachment_bytes: int = 20 * 1024 * 1024


class QuestionService:
    def __init__(self, config: ServiceConfig):
        self.config = config
        store_dir = Path(config.store_dir)
        self.store = EventStore(store_dir)
        self.registry = UserRegistry(config.users_file or store_dir / "users.json")
        self.matrix = access.default_matrix()
        self.blobs = BlobStore(store_dir / "blobs", config.max_attachment_bytes)
        self.notifications = NotificationCenter(store_dir, self.registry)
        self.notifications.rebuild(self.store.events)
        self.store.add_hook(self.notifications.on_event)

        if config.taxonomy_file:
            self.taxonomy = CategoryTaxonomy(classification.load_wordlist_file(config.taxonomy_file))
        else:
            self.taxonomy = CategoryTaxonomy()
        self.catalog = classification.load_catalog(config.catalog_file)
        self.generator_plugin = None  # optional external recommendation source

        if not lifecycle.reachable_terminal():
            raise RuntimeError("lifecycle table sanity check failed: archive unreachable")

    # -- helpers -------------------------------------------------------------

    def _user(self, user_id: str) -> access.User:
        return self.registry.get(user_id)

    def _require(self, user: access.User, operation: str, visibility=None) -> None:
        decision = authorize(user, operation, self.matrix, visibility)
        if not decision:
            if decision.reason == "visibility":
                raise Forbidden(f"clearance does not cover this resource")
            raise RoleDenied(f"operation {operation} denied for roles of {user.id}")

    def _question(self, question_id: str) -> Question:
        question = self.store.snapshot.questions.get(question_id)
        if question is None:
            raise UnknownQuestion(f"no question {question_id}")
        return question

    def _readable(self, user: access.User, question_id: str) -> Question:
        question = self._question(question_id)
        if not can_read(user, question, self.matrix):
            raise Forbidden(f"user {user.id} may not read question {question_id}")
        return question

    def _visible_pred(self, user: access.User):
        return lambda q: can_read(user, q, self.matrix)

    # -- capture -------------------------------------------------------------

    def create_question(
        self,
        actor: str,
        title: str,
        body: str,
        visibility: VisibilityLevel = VisibilityLevel.TEAM,
        tags: tuple[str, ...] = (),
        provenance: dict | None = None,
    ) -> tuple[Question, SimilarityReport]:
        user = self._user(actor)
        self._require(user, access.OP_CREATE_QUESTION)
        if visibility.rank > user.clearance.rank:
            raise Forbidden("cannot create a question above your own clearance")
        draft = new_question(actor, title, body, visibility, tags=frozenset(tags))
        payload = {
            "title": draft.title,
            "body": draft.body,
            "visibility": draft.visibility.value,
            "tags": sorted(draft.tags),
        }
        if provenance:
            payload["provenance"] = provenance
        self.store.emit("created", draft.id, actor, payload, draft.created_at)
        question = self._question(draft.id)
        report = self.find_similar(actor, question.id)
        return question, report

    def import_transcript(self, actor: str, text: str, source: str) -> list[DraftQuestion]:
        user = self._user(actor)
        self._require(user, access.OP_CREATE_QUESTION)
        return extract_questions(parse_transcript(text, source))

    def confirm_draft(self, actor: str, draft: DraftQuestion) -> tuple[Question, SimilarityReport]:
        user = self._user(actor)
        if Role.QUESTION_OWNER not in user.roles:
            raise RoleDenied("confirming a draft requires the question owner role")
        tag = f"source:{draft.source}"
        return self.create_question(
            actor,
            draft.title,
            draft.body,
            tags=(tag,),
            provenance={"source": draft.source, "offset_ms": draft.offset_ms,
                        "confidence": draft.confidence},
        )

    def attach(
        self,
        actor: str,
        question_id: str,
        data: bytes,
        filename: str,
        media_type: str,
        extracted_text: str | None = None,
    ):
        user = self._user(actor)
        self._require(user, access.OP_ATTACH)
        question = self._readable(user, question_id)
        content_hash = self.blobs.put(data)
        for existing in question.attachments:
            if existing.content_hash == content_hash:
                return existing  # idempotent re-attach of identical bytes
        attachment_id = new_id()
        payload = {
            "attachment_id": attachment_id,
            "filename": filename,
            "media_type": media_type,
            "byte_size": len(data),
            "content_hash": content_hash,
        }
        if extracted_text is not None:
            payload["extracted_text"] = extracted_text
        self.store.emit("attached", question_id, actor, payload, now_ms())
        question = self._question(question_id)
        return next(a for a in question.attachments if a.id == attachment_id)

    # -- lifecycle -----------------------------------------------------------

    def allowed_actions(self, actor: str, question_id: str) -> set[LifecycleAction]:
        user = self._user(actor)
        question = self._readable(user, question_id)
        return lifecycle.allowed_actions(question, set(user.roles))

    def transition(
        self,
        actor: str,
        question_id: str,
        action: LifecycleAction,
        payload: dict | None = None,
        expected_version: int | None = None,
    ) -> Question:
        user = self._user(actor)
        self._require(user, access.lifecycle_op(action))
        question = self._readable(user, question_id)
        if expected_version is not None and expected_version != question.version:
            raise StaleVersion(
                f"expected version {expected_version}, question is at {question.version}"
            )
        result = lifecycle.apply(question, action, actor, set(user.roles), payload)
        row = result.transition
        event_payload = {
            "action": row.action.value,
            "from": row.from_state.value,
            "to": row.to_state.value,
            **result.event_payload,
        }
        kind = "prioritized" if action is LifecycleAction.PRIORITIZE else "transitioned"
        self.store.emit(kind, question_id, actor, event_payload, now_ms())

        if action in DECIDE_ACTIONS:
            self._record_decision(actor, question_id, action, payload or {})
        return self._question(question_id)

    def _record_decision(self, actor: str, question_id: str, action: LifecycleAction, payload: dict) -> None:
        outcome = {
            LifecycleAction.DECIDE_RESOLVED: DecisionOutcome.RESOLVED,
            LifecycleAction.DECIDE_ASSUMED: DecisionOutcome.ASSUMED,
            LifecycleAction.DECIDE_UNANSWERED: DecisionOutcome.DEFERRED,
        }[action]
        previous = self.store.snapshot.decisions_by_question.get(question_id, ())
        record_payload = {
            "decision_id": new_id(),
            "outcome": outcome.value,
            "chosen_option": payload.get("chosen_option", ""),
            "considered_options": list(payload.get("considered_options", ())),
            "rationale": payload.get("rationale") or payload.get("reason") or "",
            "contributors": sorted(set(payload.get("contributors", ())) | {actor}),
        }
        if previous:
            record_payload["supersedes"] = previous[-1]
        self.store.emit("decision_recorded", question_id, actor, record_payload, now_ms())

    # -- collaboration ---------------------------------------------------------

    def comment(self, actor: str, question_id: str, body: str) -> Comment:
        user = self._user(actor)
        self._require(user, access.OP_COMMENT)
        self._readable(user, question_id)
        comment_id = new_id()
        self.store.emit("commented", question_id, actor, {"comment_id": comment_id, "body": body}, now_ms())
        return next(
            c for c in self.store.snapshot.comments[question_id] if c.id == comment_id
        )

    def categorize(self, actor: str, question_id: str, categories: set[str]) -> Question:
        user = self._user(actor)
        self._require(user, access.OP_CATEGORIZE)
        self._readable(user, question_id)
        self.taxonomy.validate(categories)
        self.store.emit(
            "categorized", question_id, actor, {"categories": sorted(categories)}, now_ms()
        )
        return self._question(question_id)

    def watch(self, actor: str, question_id: str) -> frozenset[str]:
        return self._set_watch(actor, question_id, "watch")

    def unwatch(self, actor: str, question_id: str) -> frozenset[str]:
        return self._set_watch(actor, question_id, "unwatch")

    def _set_watch(self, actor: str, question_id: str, op: str) -> frozenset[str]:
        user = self._user(actor)
        self._require(user, access.OP_WATCH)
        question = self._readable(user, question_id)
        already = actor in question.watchers
        if (op == "watch") != already:
            self.store.emit("watched", question_id, actor, {"op": op, "user": actor}, now_ms())
        return self._question(question_id).watchers

    # -- retrieval -------------------------------------------------------------

    def get_question(self, actor: str, question_id: str) -> Question:
        return self._readable(self._user(actor), question_id)

    def comments(self, actor: str, question_id: str) -> list[Comment]:
        self._readable(self._user(actor), question_id)
        return list(self.store.snapshot.comments.get(question_id, ()))

    def backlog(
        self,
        actor: str,
        status: BacklogStatus | None = None,
        category: str | None = None,
        min_score: int | None = None,
    ) -> list[Question]:
        user = self._user(actor)
        return backlog(
            self.store.snapshot, status, category, min_score, self._visible_pred(user)
        )

    def search(self, actor: str, query: SearchQuery) -> list[tuple[str, tuple[str, ...]]]:
        user = self._user(actor)
        self._require(user, access.OP_SEARCH)
        return search(self.store.snapshot, query, self._visible_pred(user))

    def find_similar(
        self,
        actor: str,
        question_id: str,
        threshold: float | None = None,
        k: int = DEFAULT_NEIGHBORS,
    ) -> SimilarityReport:
        user = self._user(actor)
        question = self._readable(user, question_id)
        threshold = self.config.similarity_threshold if threshold is None else threshold
        snapshot = self.store.snapshot
        subject_tokens = list(snapshot.doc_tokens.get(question.id, ()))
        n_docs = len(snapshot.questions)
        visible = self._visible_pred(user)
        scored = {
            other.id: similarity(
                subject_tokens,
                list(snapshot.doc_tokens.get(other.id, ())),
                snapshot.doc_freq,
                n_docs,
            )
            for other in snapshot.questions.values()
            if other.id != question.id and visible(other)
        }
        return rank_neighbors(question.id, scored, threshold, k)

    def preview_similar(
        self,
        actor: str,
        title: str,
        body: str,
        threshold: float | None = None,
        k: int = DEFAULT_NEIGHBORS,
    ) -> SimilarityReport:
        """Duplicate check for an unsaved draft (new-question dialog)."""
        user = self._user(actor)
        threshold = self.config.similarity_threshold if threshold is None else threshold
        snapshot = self.store.snapshot
        draft_tokens = tokenize(f"{title}\n{body}")
        n_docs = max(len(snapshot.questions), 1)
        visible = self._visible_pred(user)
        scored = {
            other.id: similarity(
                draft_tokens,
                list(snapshot.doc_tokens.get(other.id, ())),
                snapshot.doc_freq,
                n_docs,
            )
            for other in snapshot.questions.values()
            if visible(other)
        }
        return rank_neighbors("draft", scored, threshold, k)

    def ambiguity(self, question_id: str, title: str, body: str):
        return flag_ambiguity(question_id, title, body)

    def recommendations(self, actor: str, question_id: str):
        user = self._user(actor)
        self._readable(user, question_id)
        tokens = list(self.store.snapshot.doc_tokens.get(question_id, ()))
        return recommend(tokens, self.catalog, self.generator_plugin)

    def trace(self, actor: str, question_id: str):
        user = self._user(actor)
        self._readable(user, question_id)
        return traceability.question_events(self.store.events, question_id)

    def export_adr(self, actor: str, decision_id: str) -> str:
        user = self._user(actor)
        self._require(user, access.OP_EXPORT_ADR)
        return export_adr(decision_id, self.store.snapshot, self.store.events)

    # -- notifications ---------------------------------------------------------

    def inbox(self, actor: str, unread_only: bool = False):
        self._user(actor)
        return self.notifications.inbox(actor, unread_only)

    def mark_read(self, actor: str, notification_id: str) -> None:
        self._user(actor)
        self.notifications.mark_read(actor, notification_id)

    # -- administration --------------------------------------------------------

    def add_user(
        self,
        actor: str | None,
        user_id: str,
        name: str,
        roles: set[Role],
        clearance: VisibilityLevel = VisibilityLevel.TEAM,
        token: str | None = None,
    ) -> access.User:
        if actor is not None:
            self._require(self._user(actor), access.OP_MANAGE_USERS)
        user = access.User(
            id=user_id,
            name=name,
            roles=frozenset(roles),
            clearance=clearance,
            token_hash=access.hash_token(token) if token else "",
        )
        self.registry.put(user)
        return user
