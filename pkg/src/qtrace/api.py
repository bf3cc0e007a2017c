"""HTTP/JSON facade over QuestionService (consumed by the CLI and web UI)."""

from __future__ import annotations

import argparse
import base64
import sys

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import errors, lifecycle
from .access import Notification, User
from .classification import AmbiguityFlag, Recommendation, SimilarityReport
from .config import load_config
from .domain import (
    BacklogStatus,
    Comment,
    DecisionRecord,
    LifecycleState,
    Question,
    VisibilityLevel,
)
from .ingestion import DraftQuestion
from .lifecycle import DECIDE_BY_OUTCOME, LifecycleAction
from .service import QuestionService, ServiceConfig
from .store import Event, SearchQuery

# Machine-code map for domain errors (closed set, stable per major version).
ERROR_STATUS: list[tuple[type, int]] = [
    (errors.StaleVersion, 409),
    (errors.InvalidTransition, 409),
    (errors.NotInDecidePhase, 409),
    (errors.RoleDenied, 403),
    (errors.Forbidden, 403),
    (errors.UnknownUser, 404),
    (errors.UnknownQuestion, 404),
    (errors.UnknownDecision, 404),
    (errors.ValidationError, 422),
    (errors.EmptyCorpus, 422),
    (errors.HashMismatch, 500),
    (errors.IntegrityViolation, 500),
    (errors.ChainBroken, 500),
    (errors.UnknownEventKind, 500),
    (errors.CatalogUnavailable, 500),
]

CORRUPTION_ERRORS = (errors.HashMismatch, errors.IntegrityViolation, errors.ChainBroken)


def map_error(exc: errors.QTraceError) -> tuple[int, str]:
    """(http status, machine code) for any domain error; total mapping."""
    code = "STORE_CORRUPT" if isinstance(exc, CORRUPTION_ERRORS) else exc.code
    for klass, status in ERROR_STATUS:
        if isinstance(exc, klass):
            return status, code
    return 500, exc.code


# --- serializers ------------------------------------------------------------

def question_json(q: Question) -> dict:
    return {
        "id": q.id,
        "title": q.title,
        "body": q.body,
        "author": q.author,
        "created_at": q.created_at,
        "state": q.state.value,
        "status": q.status.value,
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


def comment_json(c: Comment) -> dict:
    return {
        "id": c.id,
        "question_id": c.question_id,
        "author": c.author,
        "body": c.body,
        "posted_at": c.posted_at,
        "state_at_posting": c.state_at_posting.value,
    }


def event_json(e: Event) -> dict:
    return {
        "seq": e.seq,
        "question_id": e.question_id,
        "actor": e.actor,
        "kind": e.kind,
        "payload": e.payload,
        "at": e.at,
        "prev_hash": e.prev_hash,
        "hash": e.hash,
    }


def similar_json(report: SimilarityReport) -> dict:
    return {
        "subject": report.subject,
        "threshold": report.threshold,
        "neighbors": [{"question_id": qid, "score": score} for qid, score in report.neighbors],
        "duplicates": [{"question_id": qid, "score": score} for qid, score in report.duplicates],
    }


def ambiguity_json(flag: AmbiguityFlag | None) -> dict | None:
    if flag is None:
        return None
    return {
        "question_id": flag.question_id,
        "reasons": sorted(flag.reasons),
        "vague_hits": list(flag.vague_hits),
    }


def recommendation_json(rec: Recommendation) -> dict:
    return {
        "concern": rec.concern,
        "recommendation": rec.recommendation,
        "source": rec.source,
        "matched": list(rec.matched),
    }


def notification_json(n: Notification) -> dict:
    return {
        "id": n.id,
        "recipient": n.recipient,
        "question_id": n.question_id,
        "kind": n.kind,
        "seq": n.seq,
        "created_at": n.created_at,
        "read": n.read,
    }


def draft_json(d: DraftQuestion) -> dict:
    return {
        "title": d.title,
        "body": d.body,
        "source": d.source,
        "offset_ms": d.offset_ms,
        "confidence": d.confidence,
    }


def decision_json(r: DecisionRecord) -> dict:
    return {
        "id": r.id,
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


def parse_action(name: str) -> LifecycleAction:
    name = name.strip().lower().replace("-", "_")
    try:
        return LifecycleAction(name)
    except ValueError:
        raise errors.InvalidTransition(f"unknown action {name!r}")


# --- application ------------------------------------------------------------

def create_app(service: QuestionService) -> FastAPI:
    app = FastAPI(title="qtrace", version="0.1.0")
    app.state.service = service

    def current_user(authorization: str | None = Header(default=None)) -> User:
        if not authorization or not authorization.lower().startswith("bearer "):
            raise errors.Forbidden("missing bearer token")
        user = service.registry.by_token(authorization.split(None, 1)[1].strip())
        if user is None:
            raise errors.Forbidden("invalid token")
        return user

    @app.exception_handler(errors.QTraceError)
    async def domain_error_handler(request: Request, exc: errors.QTraceError):
        status, code = map_error(exc)
        return JSONResponse(
            status_code=status, content={"code": code, "message": exc.message}
        )

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "last_seq": service.store.last_seq}

    @app.get("/lifecycle/table")
    def lifecycle_table():
        return {"rows": lifecycle.table_rows()}

    @app.post("/questions", status_code=201)
    def create_question(body: dict, user: User = Depends(current_user)):
        visibility = VisibilityLevel(body.get("visibility", "team"))
        provenance = body.get("provenance")
        question, similar = service.create_question(
            user.id,
            body.get("title", ""),
            body.get("body", ""),
            visibility,
            tuple(body.get("tags", ())),
            provenance=provenance,
        )
        flag = service.ambiguity(question.id, question.title, question.body)
        return {
            "question": question_json(question),
            "similar": similar_json(similar),
            "ambiguity": ambiguity_json(flag),
        }

    @app.get("/questions")
    def list_questions(
        status: str | None = None,
        category: str | None = None,
        min_score: int | None = None,
        user: User = Depends(current_user),
    ):
        bucket = BacklogStatus(status) if status else None
        rows = service.backlog(user.id, bucket, category, min_score)
        return {"questions": [question_json(q) for q in rows]}

    @app.get("/questions/{question_id}")
    def get_question(question_id: str, user: User = Depends(current_user)):
        question = service.get_question(user.id, question_id)
        return {
            "question": question_json(question),
            "comments": [comment_json(c) for c in service.comments(user.id, question_id)],
            "decisions": [
                decision_json(service.store.snapshot.decisions[did])
                for did in service.store.snapshot.decisions_by_question.get(question_id, ())
            ],
        }

    @app.get("/questions/{question_id}/trace")
    def trace(question_id: str, user: User = Depends(current_user)):
        return {"events": [event_json(e) for e in service.trace(user.id, question_id)]}

    @app.get("/questions/{question_id}/similar")
    def similar(
        question_id: str,
        threshold: float | None = None,
        k: int = 5,
        user: User = Depends(current_user),
    ):
        return similar_json(service.find_similar(user.id, question_id, threshold, k))

    @app.get("/questions/{question_id}/actions")
    def actions(question_id: str, user: User = Depends(current_user)):
        allowed = service.allowed_actions(user.id, question_id)
        return {"actions": sorted(a.value for a in allowed)}

    @app.get("/questions/{question_id}/recommendations")
    def recommendations(question_id: str, user: User = Depends(current_user)):
        recs = service.recommendations(user.id, question_id)
        return {"recommendations": [recommendation_json(r) for r in recs]}

    @app.post("/questions/{question_id}/transitions")
    def transition(question_id: str, body: dict, user: User = Depends(current_user)):
        action_name = body.get("action", "")
        if action_name == "decide":
            outcome = body.get("payload", {}).get("outcome", "")
            if outcome not in DECIDE_BY_OUTCOME:
                raise errors.MissingPayload("decide requires outcome resolved|assumed|unanswered")
            action = DECIDE_BY_OUTCOME[outcome]
        else:
            action = parse_action(action_name)
        question = service.transition(
            user.id,
            question_id,
            action,
            body.get("payload") or {},
            body.get("expected_version"),
        )
        return {"question": question_json(question)}

    @app.post("/questions/{question_id}/comments", status_code=201)
    def add_comment(question_id: str, body: dict, user: User = Depends(current_user)):
        comment = service.comment(user.id, question_id, body.get("body", ""))
        return {"comment": comment_json(comment)}

    @app.post("/questions/{question_id}/categories")
    def set_categories(question_id: str, body: dict, user: User = Depends(current_user)):
        question = service.categorize(user.id, question_id, set(body.get("categories", ())))
        return {"question": question_json(question)}

    @app.post("/questions/{question_id}/attachments", status_code=201)
    def add_attachment(question_id: str, body: dict, user: User = Depends(current_user)):
        try:
            data = base64.b64decode(body.get("content_base64", ""), validate=True)
        except Exception:
            raise errors.ValidationError("content_base64 is not valid base64")
        attachment = service.attach(
            user.id,
            question_id,
            data,
            body.get("filename", "attachment.bin"),
            body.get("media_type", "application/octet-stream"),
            body.get("extracted_text"),
        )
        return {
            "attachment": {
                "id": attachment.id,
                "filename": attachment.filename,
                "media_type": attachment.media_type,
                "byte_size": attachment.byte_size,
                "content_hash": attachment.content_hash,
                "extracted_text": attachment.extracted_text,
            }
        }

    @app.post("/questions/{question_id}/watch")
    def watch(question_id: str, body: dict, user: User = Depends(current_user)):
        if body.get("watch", True):
            watchers = service.watch(user.id, question_id)
        else:
            watchers = service.unwatch(user.id, question_id)
        return {"watchers": sorted(watchers)}

    @app.get("/search")
    def search_endpoint(
        q: str = "",
        status: str | None = None,
        state: str | None = None,
        category: str | None = None,
        min_score: int | None = None,
        user: User = Depends(current_user),
    ):
        from .classification import tokenize

        query = SearchQuery(
            keywords=tuple(tokenize(q)),
            status=BacklogStatus(status) if status else None,
            state=LifecycleState(state) if state else None,
            category=category,
            min_score=min_score,
        )
        results = service.search(user.id, query)
        return {
            "results": [
                {"question_id": qid, "matched": list(matched)} for qid, matched in results
            ]
        }

    @app.get("/decisions/{decision_id}/adr")
    def adr(decision_id: str, user: User = Depends(current_user)):
        return PlainTextResponse(service.export_adr(user.id, decision_id))

    @app.post("/imports/transcript")
    def import_transcript(body: dict, user: User = Depends(current_user)):
        drafts = service.import_transcript(
            user.id, body.get("text", ""), body.get("source", "transcript")
        )
        return {"drafts": [draft_json(d) for d in drafts]}

    @app.post("/drafts/preview")
    def preview_draft(body: dict, user: User = Depends(current_user)):
        title, text = body.get("title", ""), body.get("body", "")
        report = service.preview_similar(user.id, title, text)
        flag = service.ambiguity("draft", title, text)
        return {"similar": similar_json(report), "ambiguity": ambiguity_json(flag)}

    @app.get("/notifications")
    def notifications(unread: bool = False, user: User = Depends(current_user)):
        notes = service.inbox(user.id, unread_only=unread)
        return {"notifications": [notification_json(n) for n in notes]}

    @app.post("/notifications/{notification_id}/read")
    def mark_read(notification_id: str, user: User = Depends(current_user)):
        service.mark_read(user.id, notification_id)
        return {"ok": True}

    return app


def serve(config_path: str | None = None, listen: str | None = None, store: str | None = None):
    values = load_config(config_path)
    if listen:
        values["listen"] = listen
    if store:
        values["store"] = store
    service = QuestionService(
        ServiceConfig(
            store_dir=values["store"],
            users_file=values.get("users_file"),
            taxonomy_file=values.get("taxonomy_file"),
            catalog_file=values.get("catalog_file"),
            similarity_threshold=float(values.get("similarity_threshold", 0.35)),
        )
    )
    app = create_app(service)
    host, _, port = values["listen"].rpartition(":")
    import uvicorn

    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qtrace-server")
    parser.add_argument("--config", default=None, help="key = value config file")
    parser.add_argument("--listen", default=None, help="host:port")
    parser.add_argument("--store", default=None, help="store directory")
    args = parser.parse_args(argv)
    try:
        serve(args.config, args.listen, args.store)
    except Exception as exc:  # startup failures abort with a diagnostic
        print(f"qtrace-server: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
