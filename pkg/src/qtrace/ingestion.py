"""Capture adapters: transcript import, question drafting, attachment blobs.

Transcript file format: UTF-8 lines of ``offset-ms<TAB>speaker<TAB>text``
(speaker may be empty). Blobs are content-addressed under
``blobs/<first two hash chars>/<hash>``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .classification import INTERROGATIVES, _TOKEN_RE
from .domain import MAX_TITLE_LEN
from .errors import EmptyDocument, TooLarge, ValidationError

DEFAULT_MAX_ATTACHMENT_BYTES = 20 * 1024 * 1024


@dataclass(frozen=True)
class Utterance:
    offset_ms: int
    speaker: str
    text: str


@dataclass(frozen=True)
class TranscriptDocument:
    source: str
    utterances: tuple[Utterance, ...]


@dataclass(frozen=True)
class DraftQuestion:
    title: str
    body: str
    source: str
    offset_ms: int
    confidence: str  # "high" | "low"


def parse_transcript(text: str, source: str) -> TranscriptDocument:
    utterances = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ValidationError(f"transcript line {lineno}: expected offset<TAB>speaker<TAB>text")
        try:
            offset = int(parts[0])
        except ValueError:
            raise ValidationError(f"transcript line {lineno}: bad offset {parts[0]!r}")
        utterances.append(Utterance(offset, parts[1], parts[2]))
    utterances.sort(key=lambda u: u.offset_ms)
    return TranscriptDocument(source, tuple(utterances))


def _is_question(text: str) -> tuple[bool, str]:
    """(matches, confidence): '?'-terminated is high, leading interrogative low."""
    stripped = text.rstrip()
    if stripped.endswith("?"):
        return True, "high"
    words = _TOKEN_RE.findall(stripped.lower())
    if words and words[0] in INTERROGATIVES:
        return True, "low"
    return False, ""


def _first_sentence(text: str) -> str:
    for stop in (". ", "! "):
        if stop in text:
            text = text.split(stop, 1)[0] + stop.strip()
            break
    return " ".join(text.split())[:MAX_TITLE_LEN]


def extract_questions(doc: TranscriptDocument) -> list[DraftQuestion]:
    """Drafts for interrogative utterances; declarative ones are filtered out.

    The draft body carries the neighboring utterances for context.
    """
    if not doc.utterances:
        raise EmptyDocument("transcript has no utterances")
    drafts = []
    for i, utt in enumerate(doc.utterances):
        matches, confidence = _is_question(utt.text)
        if not matches:
            continue
        context = []
        if i > 0:
            context.append(doc.utterances[i - 1].text)
        context.append(utt.text)
        if i + 1 < len(doc.utterances):
            context.append(doc.utterances[i + 1].text)
        drafts.append(
            DraftQuestion(
                title=_first_sentence(utt.text),
                body="\n".join(context),
                source=doc.source,
                offset_ms=utt.offset_ms,
                confidence=confidence,
            )
        )
    return drafts


class BlobStore:
    """Content-addressed attachment bytes."""

    def __init__(self, directory: str | Path, max_bytes: int = DEFAULT_MAX_ATTACHMENT_BYTES):
        self.directory = Path(directory)
        self.max_bytes = max_bytes

    def put(self, data: bytes) -> str:
        if len(data) > self.max_bytes:
            raise TooLarge(f"attachment exceeds {self.max_bytes} bytes")
        digest = hashlib.sha256(data).hexdigest()
        path = self.directory / digest[:2] / digest
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        return digest

    def get(self, content_hash: str) -> bytes:
        path = self.directory / content_hash[:2] / content_hash
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != content_hash:
            raise ValidationError(f"blob {content_hash} corrupted on disk")
        return data
