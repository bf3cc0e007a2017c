"""Sortable 26-character identifiers (ULID layout: 48-bit ms timestamp + 80 random bits)."""

from __future__ import annotations

import secrets
import time

CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
ID_LENGTH = 26
_TIME_CHARS = 10
_MAX_TS_MS = (1 << 48) - 1


def new_id(ts_ms: int | None = None) -> str:
    """Generate a lexicographically sortable unique identifier.

    The first 10 characters encode the millisecond timestamp, so lexical
    order follows creation order (ties broken by the random suffix).
    """
    if ts_ms is None:
        ts_ms = time.time_ns() // 1_000_000
    if not 0 <= ts_ms <= _MAX_TS_MS:
        raise ValueError(f"timestamp out of range: {ts_ms}")
    value = (ts_ms << 80) | int.from_bytes(secrets.token_bytes(10), "big")
    chars = []
    for _ in range(ID_LENGTH):
        chars.append(CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def id_timestamp_ms(identifier: str) -> int:
    """Recover the millisecond timestamp encoded in an identifier."""
    if len(identifier) != ID_LENGTH:
        raise ValueError(f"bad identifier length: {identifier!r}")
    value = 0
    for ch in identifier[:_TIME_CHARS]:
        value = (value << 5) | CROCKFORD.index(ch)
    return value


def is_valid_id(identifier: str) -> bool:
    return len(identifier) == ID_LENGTH and all(c in CROCKFORD for c in identifier)
