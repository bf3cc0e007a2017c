"""Tokenization, TF-IDF similarity, ambiguity heuristics, priority ordering,
and rule-based recommendations."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .domain import Question
from .errors import CatalogUnavailable, EmptyCorpus, ValidationError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

INTERROGATIVES = ("who", "what", "when", "where", "why", "how", "which", "should", "can")


def _load_wordlist(name: str) -> tuple[str, ...]:
    text = resources.files("qtrace.data").joinpath(name).read_text("utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))


DEFAULT_STOPWORDS = frozenset(_load_wordlist("stopwords.txt"))
DEFAULT_VAGUE_TERMS = frozenset(_load_wordlist("vague_terms.txt"))
DEFAULT_TAXONOMY = _load_wordlist("taxonomy.txt")


def load_wordlist_file(path: str | Path) -> tuple[str, ...]:
    """One entry per line, UTF-8; blank lines and '#' comments skipped."""
    lines = Path(path).read_text("utf-8").splitlines()
    return tuple(line.strip() for line in lines if line.strip() and not line.startswith("#"))


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords.

    Order is preserved and duplicates are kept; the stopword list deliberately
    excludes interrogative words so they stay available as ambiguity signal.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) >= 2 and t not in stopwords]


# --- TF-IDF similarity ------------------------------------------------------

def idf(df: int, n_docs: int) -> float:
    """Smoothed inverse document frequency, always > 0."""
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def tfidf_vector(tokens: list[str], doc_freq: dict[str, int], n_docs: int) -> dict[str, float]:
    counts = Counter(tokens)
    return {term: tf * idf(doc_freq.get(term, 0), n_docs) for term, tf in counts.items()}


def similarity(
    a: list[str],
    b: list[str],
    doc_freq: dict[str, int],
    n_docs: int,
) -> float:
    """Cosine similarity of smoothed TF-IDF vectors; 0.0 when either is empty."""
    if n_docs < 1:
        raise EmptyCorpus("document-frequency table built over an empty corpus")
    va = tfidf_vector(a, doc_freq, n_docs)
    vb = tfidf_vector(b, doc_freq, n_docs)
    if not va or not vb:
        return 0.0
    dot = sum(w * vb[t] for t, w in va.items() if t in vb)
    if dot == 0.0:
        return 0.0
    norm_a = math.sqrt(sum(w * w for w in va.values()))
    norm_b = math.sqrt(sum(w * w for w in vb.values()))
    return min(dot / (norm_a * norm_b), 1.0)


@dataclass(frozen=True)
class SimilarityReport:
    subject: str
    neighbors: tuple[tuple[str, float], ...]
    threshold: float

    @property
    def duplicates(self) -> tuple[tuple[str, float], ...]:
        return tuple((qid, s) for qid, s in self.neighbors if s >= self.threshold)


def rank_neighbors(
    subject: str,
    scored: dict[str, float],
    threshold: float,
    k: int,
) -> SimilarityReport:
    """Top-k neighbors sorted by score descending, ties by id ascending."""
    ordered = sorted(scored.items(), key=lambda item: (-item[1], item[0]))[:k]
    return SimilarityReport(subject, tuple(ordered), threshold)


# --- Ambiguity heuristics ---------------------------------------------------

@dataclass(frozen=True)
class AmbiguityFlag:
    question_id: str
    reasons: frozenset[str]
    vague_hits: tuple[str, ...]


def flag_ambiguity(
    question_id: str,
    title: str,
    body: str,
    vague_terms: frozenset[str] = DEFAULT_VAGUE_TERMS,
) -> AmbiguityFlag | None:
    """Apply the four ambiguity rules; None when none fire."""
    text = f"{title}\n{body}"
    reasons: set[str] = set()

    qmarks = text.count("?")
    starts_interrogative = any(
        (words := _TOKEN_RE.findall(part.lower())) and words[0] in INTERROGATIVES
        for part in (title, body)
    )
    if qmarks == 0 and not starts_interrogative:
        reasons.add("no_interrogative")

    tokens = tokenize(text)
    if len(tokens) < 5:
        reasons.add("too_short")

    hits = tuple(sorted({t for t in _TOKEN_RE.findall(text.lower()) if t in vague_terms}))
    if hits:
        reasons.add("vague_terms")

    if qmarks >= 3:
        reasons.add("multiple_questions")

    if not reasons:
        return None
    return AmbiguityFlag(question_id, frozenset(reasons), hits)


# --- Priority ordering ------------------------------------------------------

def backlog_sort_key(question: Question):
    """Total order for backlog and search results.

    Prioritized questions first: score descending, created_at ascending, id
    ascending. Unprioritized after them, newest first.
    """
    if question.priority is not None:
        return (0, -question.priority.score, question.created_at, question.id)
    return (1, -question.created_at, question.id)


# --- Recommendation catalog -------------------------------------------------

@dataclass(frozen=True)
class CatalogRule:
    triggers: frozenset[str]
    concern: str
    recommendation: str
    source: str


@dataclass(frozen=True)
class Recommendation:
    concern: str
    recommendation: str
    source: str
    matched: tuple[str, ...]


def parse_catalog(text: str) -> tuple[CatalogRule, ...]:
    """Parse blank-line-separated rule blocks of 'key: value' lines."""
    rules = []
    block: dict[str, str] = {}

    def flush():
        if not block:
            return
        triggers = frozenset(
            t.strip().lower() for t in block.get("triggers", "").split(",") if t.strip()
        )
        if not triggers:
            raise CatalogUnavailable("catalog rule without triggers")
        rules.append(
            CatalogRule(
                triggers=triggers,
                concern=block.get("concern", ""),
                recommendation=block.get("recommendation", ""),
                source=block.get("source", "catalog"),
            )
        )
        block.clear()

    for line in text.splitlines():
        line = line.strip()
        if not line:
            flush()
            continue
        if line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if sep:
            block[key.strip().lower()] = value.strip()
    flush()
    return tuple(rules)


def load_catalog(path: str | Path | None = None) -> tuple[CatalogRule, ...]:
    if path is None:
        text = resources.files("qtrace.data").joinpath("catalog.txt").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text("utf-8")
        except OSError as exc:
            raise CatalogUnavailable(str(exc))
    return parse_catalog(text)


def recommend(
    tokens: list[str],
    catalog: tuple[CatalogRule, ...],
    generator=None,
) -> list[Recommendation]:
    """Every rule whose triggers intersect the token set, most hits first,
    ties by catalog position; plugin output (if any) appended after."""
    token_set = set(tokens)
    matched = []
    for pos, rule in enumerate(catalog):
        hits = tuple(sorted(rule.triggers & token_set))
        if hits:
            matched.append((-len(hits), pos, rule, hits))
    matched.sort(key=lambda item: (item[0], item[1]))
    results = [
        Recommendation(rule.concern, rule.recommendation, rule.source, hits)
        for _, _, rule, hits in matched
    ]
    if generator is not None:
        results.extend(generator(tokens))
    return results


# --- Category taxonomy ------------------------------------------------------

@dataclass(frozen=True)
class CategoryTaxonomy:
    labels: tuple[str, ...] = field(default=DEFAULT_TAXONOMY)

    def __post_init__(self):
        seen = set()
        for label in self.labels:
            if not label or label != label.lower() or label in seen:
                raise ValueError(f"bad taxonomy label: {label!r}")
            seen.add(label)

    def validate(self, categories: set[str]) -> set[str]:
        unknown = categories - set(self.labels)
        if unknown:
            raise ValidationError(f"unknown categories: {sorted(unknown)}")
        return categories
