"""Users, role/permission matrix, multi-level visibility, watching, and
notification fan-out with optional signed webhooks."""

from __future__ import annotations

import hashlib
import hmac
import json
import re
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .domain import LifecycleState, Question, Role, VisibilityLevel
from .errors import UnknownUser
from .lifecycle import LifecycleAction, TRANSITION_TABLE
from .store import Event, StoreSnapshot, canonical_bytes

LIFECYCLE_ROLES = frozenset(
    {Role.QUESTION_OWNER, Role.PRODUCT_OWNER, Role.DEVELOPER_RESEARCHER, Role.DECISION_MAKER}
)

_MENTION_RE = re.compile(r"@([A-Za-z0-9_\-]+)")


@dataclass(frozen=True)
class User:
    id: str
    name: str
    roles: frozenset[Role]
    clearance: VisibilityLevel = VisibilityLevel.TEAM
    token_hash: str = ""

    def __post_init__(self):
        if not self.roles:
            raise ValueError("a user must hold at least one role")


def hash_token(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


# --- Permission matrix ------------------------------------------------------

def lifecycle_op(action: LifecycleAction) -> str:
    return f"lifecycle:{action.value}"


OP_CREATE_QUESTION = "create_question"
OP_COMMENT = "comment"
OP_READ_QUESTION = "read_question"
OP_MANAGE_USERS = "manage_users"
OP_EXPORT_ADR = "export_adr"
OP_SEARCH = "search"
OP_CATEGORIZE = "categorize"
OP_ATTACH = "attach"
OP_WATCH = "watch"

RESOURCE_OPS = frozenset(
    {OP_READ_QUESTION, OP_COMMENT, OP_CATEGORIZE, OP_ATTACH, OP_WATCH}
    | {lifecycle_op(a) for a in LifecycleAction}
)


def default_matrix() -> dict[tuple[Role, str], bool]:
    """Deny-by-default matrix; lifecycle rows derive from the transition table."""
    matrix: dict[tuple[Role, str], bool] = {}
    for role in LIFECYCLE_ROLES:
        for op in (OP_COMMENT, OP_READ_QUESTION, OP_EXPORT_ADR, OP_SEARCH,
                   OP_CATEGORIZE, OP_ATTACH, OP_WATCH):
            matrix[(role, op)] = True
    matrix[(Role.QUESTION_OWNER, OP_CREATE_QUESTION)] = True
    matrix[(Role.ADMIN, OP_MANAGE_USERS)] = True
    for row in TRANSITION_TABLE:
        for role in row.allowed_roles:
            matrix[(role, lifecycle_op(row.action))] = True
    return matrix


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.allowed


def authorize(
    user: User,
    operation: str,
    matrix: dict[tuple[Role, str], bool],
    resource_visibility: VisibilityLevel | None = None,
) -> Decision:
    """Allow iff some role of the user is granted the operation and, for
    resource-scoped operations, the user's clearance covers the resource."""
    if not any(matrix.get((role, operation), False) for role in user.roles):
        return Decision(False, "role")
    if resource_visibility is not None and user.clearance.rank < resource_visibility.rank:
        return Decision(False, "visibility")
    return Decision(True)


def can_read(user: User, question: Question, matrix: dict[tuple[Role, str], bool]) -> bool:
    return bool(authorize(user, OP_READ_QUESTION, matrix, question.visibility))


# --- User registry ----------------------------------------------------------

class UserRegistry:
    """Users persisted as a JSON document; reloaded when the file changes."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._mtime = -1.0
        self._users: dict[str, User] = {}
        self.reload()

    def reload(self) -> None:
        if not self.path.exists():
            self._users = {}
            return
        mtime = self.path.stat().st_mtime
        if mtime == self._mtime:
            return
        data = json.loads(self.path.read_text("utf-8"))
        users = {}
        for row in data.get("users", []):
            users[row["id"]] = User(
                id=row["id"],
                name=row.get("name", row["id"]),
                roles=frozenset(Role(r) for r in row["roles"]),
                clearance=VisibilityLevel(row.get("clearance", "team")),
                token_hash=row.get("token_hash", ""),
            )
        self._users = users
        self._mtime = mtime

    def save(self) -> None:
        rows = [
            {
                "id": u.id,
                "name": u.name,
                "roles": sorted(r.value for r in u.roles),
                "clearance": u.clearance.value,
                "token_hash": u.token_hash,
            }
            for u in sorted(self._users.values(), key=lambda u: u.id)
        ]
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps({"users": rows}, indent=2) + "\n", "utf-8")
        self._mtime = self.path.stat().st_mtime

    def put(self, user: User) -> None:
        self._users[user.id] = user
        self.save()

    def get(self, user_id: str) -> User:
        self.reload()
        user = self._users.get(user_id)
        if user is None:
            raise UnknownUser(f"no user {user_id!r}")
        return user

    def exists(self, user_id: str) -> bool:
        self.reload()
        return user_id in self._users

    def by_token(self, token: str) -> User | None:
        self.reload()
        digest = hash_token(token)
        for user in self._users.values():
            if user.token_hash and hmac.compare_digest(user.token_hash, digest):
                return user
        return None

    def all(self) -> list[User]:
        self.reload()
        return sorted(self._users.values(), key=lambda u: u.id)


# --- Notifications ----------------------------------------------------------

class NotificationKind:
    UPDATED = "updated"
    COMMENTED = "commented"
    RESOLVED = "resolved"
    ASSUMED = "assumed"
    REEMERGED = "reemerged"
    MENTIONED = "mentioned"


@dataclass(frozen=True)
class Notification:
    id: str
    recipient: str
    question_id: str
    kind: str
    seq: int
    created_at: int
    read: bool = False


def notification_kind(event: Event) -> str:
    if event.kind == "commented":
        return NotificationKind.COMMENTED
    if event.kind in ("transitioned", "prioritized"):
        if event.payload.get("action") == LifecycleAction.REEMERGE.value:
            return NotificationKind.REEMERGED
        to_state = event.payload.get("to")
        if to_state == LifecycleState.RESOLVED.value:
            return NotificationKind.RESOLVED
        if to_state == LifecycleState.ASSUMED.value:
            return NotificationKind.ASSUMED
    return NotificationKind.UPDATED


def fan_out(event: Event, snapshot: StoreSnapshot, known_users: set[str]) -> list[Notification]:
    """One notification per (recipient, event): watchers minus the actor,
    plus existing users @mentioned in a comment body."""
    question = snapshot.questions.get(event.question_id)
    if question is None:
        return []
    base_kind = notification_kind(event)
    recipients = {(user, base_kind) for user in question.watchers if user != event.actor}
    if event.kind == "commented":
        mentioned = {
            m
            for m in _MENTION_RE.findall(event.payload.get("body", ""))
            if m in known_users and m != event.actor
        }
        recipients = {(u, k) for u, k in recipients if u not in mentioned}
        recipients |= {(u, NotificationKind.MENTIONED) for u in mentioned}
    return [
        Notification(
            id=f"{event.seq}:{user}",
            recipient=user,
            question_id=event.question_id,
            kind=kind,
            seq=event.seq,
            created_at=event.at,
        )
        for user, kind in sorted(recipients)
    ]


class NotificationCenter:
    """In-app inboxes derived from the event log; read marks persisted in a
    sidecar file so replay never loses them."""

    def __init__(self, directory: str | Path, registry: UserRegistry):
        self.directory = Path(directory)
        self.registry = registry
        self.read_path = self.directory / "read_marks.json"
        self._read: set[str] = set()
        if self.read_path.exists():
            self._read = set(json.loads(self.read_path.read_text("utf-8")))
        self._inbox: dict[str, list[Notification]] = {}
        self.webhooks = WebhookDispatcher(self.directory / "webhooks.json")

    def known_users(self) -> set[str]:
        return {u.id for u in self.registry.all()}

    def on_event(self, event: Event, snapshot: StoreSnapshot) -> list[Notification]:
        notes = fan_out(event, snapshot, self.known_users())
        for note in notes:
            if note.id in self._read:
                note = replace(note, read=True)
            self._inbox.setdefault(note.recipient, []).append(note)
            self.webhooks.deliver(note, event)
        return notes

    def rebuild(self, events: list[Event]) -> None:
        """Recreate inboxes from the event log (no webhook redelivery)."""
        from .store import StoreSnapshot as _Snapshot, fold_event

        self._inbox = {}
        snapshot = _Snapshot.empty()
        known = self.known_users()
        for event in events:
            fold_event(snapshot, event)
            for note in fan_out(event, snapshot, known):
                if note.id in self._read:
                    note = replace(note, read=True)
                self._inbox.setdefault(note.recipient, []).append(note)

    def inbox(self, user_id: str, unread_only: bool = False) -> list[Notification]:
        notes = self._inbox.get(user_id, [])
        if unread_only:
            notes = [n for n in notes if not n.read]
        return list(notes)

    def mark_read(self, user_id: str, notification_id: str) -> None:
        notes = self._inbox.get(user_id, [])
        for i, note in enumerate(notes):
            if note.id == notification_id:
                notes[i] = replace(note, read=True)
                self._read.add(notification_id)
        self.read_path.write_text(json.dumps(sorted(self._read)) + "\n", "utf-8")


# --- Webhooks ---------------------------------------------------------------

def sign_body(secret: str, body: bytes) -> str:
    return hmac.new(secret.encode("utf-8"), body, hashlib.sha256).hexdigest()


class WebhookDispatcher:
    """POSTs signed notification payloads; 3 retries with exponential backoff,
    then the delivery is dropped with a warning."""

    def __init__(self, config_path: Path, poster=None, retries: int = 3, backoff: float = 0.2):
        self.config_path = config_path
        self.retries = retries
        self.backoff = backoff
        self.poster = poster  # injectable for tests; default uses httpx
        self.synchronous = False

    def _endpoints(self) -> dict[str, dict]:
        if not self.config_path.exists():
            return {}
        return json.loads(self.config_path.read_text("utf-8"))

    def deliver(self, note: Notification, event: Event) -> None:
        endpoint = self._endpoints().get(note.recipient)
        if not endpoint:
            return
        body = canonical_bytes(
            {
                "notification": {
                    "id": note.id,
                    "recipient": note.recipient,
                    "question_id": note.question_id,
                    "kind": note.kind,
                    "seq": note.seq,
                    "created_at": note.created_at,
                },
                "event": {
                    "seq": event.seq,
                    "kind": event.kind,
                    "actor": event.actor,
                    "payload": event.payload,
                },
            }
        )
        signature = sign_body(endpoint.get("secret", ""), body)
        if self.synchronous:
            self._send(endpoint["url"], body, signature)
        else:
            threading.Thread(
                target=self._send, args=(endpoint["url"], body, signature), daemon=True
            ).start()

    def _send(self, url: str, body: bytes, signature: str) -> None:
        import logging

        poster = self.poster
        if poster is None:
            import httpx

            def poster(u, b, headers):
                return httpx.post(u, content=b, headers=headers, timeout=5.0).status_code

        headers = {"Content-Type": "application/json", "X-QTrace-Signature": signature}
        for attempt in range(self.retries):
            try:
                status = poster(url, body, headers)
                if 200 <= status < 300:
                    return
            except Exception:
                pass
            time.sleep(self.backoff * (2**attempt))
        logging.getLogger("qtrace.webhooks").warning("webhook delivery to %s dropped", url)
