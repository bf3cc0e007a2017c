"""Domain error hierarchy.

Every error carries a stable machine ``code`` so the HTTP layer and the CLI
can map failures without string matching.
"""

from __future__ import annotations


class QTraceError(Exception):
    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


class ValidationError(QTraceError):
    code = "VALIDATION"


class EmptyTitle(ValidationError):
    code = "EMPTY_TITLE"


class OutOfRange(ValidationError):
    code = "OUT_OF_RANGE"


class MissingPayload(ValidationError):
    code = "MISSING_PAYLOAD"


class EmptyRationale(ValidationError):
    code = "EMPTY_RATIONALE"


class EmptyQuery(ValidationError):
    code = "EMPTY_QUERY"


class EmptyDocument(ValidationError):
    code = "EMPTY_DOCUMENT"


class TooLarge(ValidationError):
    code = "TOO_LARGE"


class UnknownUser(QTraceError):
    code = "UNKNOWN_USER"


class UnknownQuestion(QTraceError):
    code = "UNKNOWN_QUESTION"


class UnknownDecision(QTraceError):
    code = "UNKNOWN_DECISION"


class InvalidTransition(QTraceError):
    code = "INVALID_TRANSITION"


class NotInDecidePhase(QTraceError):
    code = "NOT_IN_DECIDE_PHASE"


class RoleDenied(QTraceError):
    code = "ROLE_DENIED"


class Forbidden(QTraceError):
    code = "FORBIDDEN"


class StaleVersion(QTraceError):
    code = "STALE_VERSION"


class EmptyCorpus(QTraceError):
    code = "EMPTY_CORPUS"


class CatalogUnavailable(QTraceError):
    code = "CATALOG_UNAVAILABLE"


class HashMismatch(QTraceError):
    code = "HASH_MISMATCH"


class IntegrityViolation(QTraceError):
    code = "INTEGRITY_VIOLATION"


class ChainBroken(QTraceError):
    code = "CHAIN_BROKEN"


class UnknownEventKind(QTraceError):
    code = "UNKNOWN_EVENT_KIND"
