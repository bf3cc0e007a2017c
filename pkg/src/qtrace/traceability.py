"""Decision records, question dossiers, and ADR-style plain-text export.

Export format: fixed section order (Title, Status, Context, Considered
Options, Decision, Rationale, Contributors, Trace). Section content lines
are indented by two spaces so arbitrary multi-line text round-trips;
``parse_adr(render_adr(fields)) == fields`` and re-rendering is a byte-
identical fixed point.
"""

from __future__ import annotations

from .domain import DecisionOutcome, DecisionRecord
from .errors import UnknownDecision
from .store import Event, StoreSnapshot

ADR_STATUS_BY_OUTCOME = {
    DecisionOutcome.RESOLVED: "accepted",
    DecisionOutcome.ASSUMED: "assumed",
    DecisionOutcome.DEFERRED: "deferred",
}

_SECTIONS = (
    "Title",
    "Status",
    "Context",
    "Considered Options",
    "Decision",
    "Rationale",
    "Contributors",
    "Trace",
)


def decision_status(record: DecisionRecord, snapshot: StoreSnapshot) -> str:
    """ADR status; a record pointed at by a newer record's supersedes link is
    reported as superseded regardless of its own outcome."""
    for other in snapshot.decisions.values():
        if other.supersedes == record.id:
            return "superseded"
    return ADR_STATUS_BY_OUTCOME[record.outcome]


def question_events(events: list[Event], question_id: str) -> list[Event]:
    return [e for e in events if e.question_id == question_id]


def adr_fields(record: DecisionRecord, snapshot: StoreSnapshot, events: list[Event]) -> dict:
    question = snapshot.questions[record.question_id]
    seqs = [e.seq for e in question_events(events, record.question_id)]
    return {
        "id": record.id,
        "title": question.title,
        "status": decision_status(record, snapshot),
        "body": question.body,
        "options": list(record.considered_options),
        "decision": record.chosen_option,
        "rationale": record.rationale,
        "contributors": sorted(record.contributors),
        "question_id": record.question_id,
        "seq_range": (min(seqs), max(seqs)) if seqs else (0, 0),
    }


def _indent(text: str) -> list[str]:
    return [f"  {line}" for line in text.split("\n")]


def render_adr(fields: dict) -> str:
    lines: list[str] = [f"ADR: {fields['id']}", ""]
    lines.append("== Title ==")
    lines.extend(_indent(fields["title"]))
    lines.append("")
    lines.append("== Status ==")
    lines.append(f"  {fields['status']}")
    lines.append("")
    lines.append("== Context ==")
    lines.append(f"  Question: {fields['title']}")
    lines.extend(_indent(fields["body"]))
    lines.append("")
    lines.append("== Considered Options ==")
    for option in fields["options"]:
        first, *rest = option.split("\n")
        lines.append(f"  * {first}")
        lines.extend(f"    {line}" for line in rest)
    lines.append("")
    lines.append("== Decision ==")
    lines.extend(_indent(fields["decision"]))
    lines.append("")
    lines.append("== Rationale ==")
    lines.extend(_indent(fields["rationale"]))
    lines.append("")
    lines.append("== Contributors ==")
    lines.extend(f"  {c}" for c in fields["contributors"])
    lines.append("")
    lines.append("== Trace ==")
    lines.append(f"  question: {fields['question_id']}")
    lines.append(f"  events: {fields['seq_range'][0]}..{fields['seq_range'][1]}")
    lines.append("")
    return "\n".join(lines)


def parse_adr(text: str) -> dict:
    """Inverse of render_adr; recovers every exported field verbatim."""
    lines = text.split("\n")
    if not lines or not lines[0].startswith("ADR: "):
        raise ValueError("not an ADR document")
    doc_id = lines[0][len("ADR: "):]

    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in lines[1:]:
        if line.startswith("== ") and line.endswith(" =="):
            current = line[3:-3]
            sections[current] = []
        elif current is not None:
            sections[current].append(line)

    def content(name: str) -> list[str]:
        raw = sections.get(name, [])
        while raw and raw[-1] == "":
            raw = raw[:-1]
        return [line[2:] for line in raw]

    title = "\n".join(content("Title"))
    status = content("Status")[0]
    context = content("Context")
    body = "\n".join(context[1:])

    options: list[str] = []
    for line in content("Considered Options"):
        if line.startswith("* "):
            options.append(line[2:])
        elif options:
            options[-1] += "\n" + line[2:]

    trace = dict(line.split(": ", 1) for line in content("Trace"))
    lo, hi = trace["events"].split("..")
    return {
        "id": doc_id,
        "title": title,
        "status": status,
        "body": body,
        "options": options,
        "decision": "\n".join(content("Decision")),
        "rationale": "\n".join(content("Rationale")),
        "contributors": content("Contributors"),
        "question_id": trace["question"],
        "seq_range": (int(lo), int(hi)),
    }


def export_adr(decision_id: str, snapshot: StoreSnapshot, events: list[Event]) -> str:
    record = snapshot.decisions.get(decision_id)
    if record is None:
        raise UnknownDecision(f"no decision {decision_id}")
    return render_adr(adr_fields(record, snapshot, events))


def adr_filename(decision_id: str) -> str:
    return f"adr-{decision_id}.txt"
