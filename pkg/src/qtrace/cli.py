"""Terminal client for the qtrace HTTP API.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 network unreachable.
"""

from __future__ import annotations

import base64
import json
import os
import stat
import sys
from pathlib import Path

import click
import httpx

from .access import hash_token
from .config import parse_config_text

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "qtrace" / "config"


class CliError(click.ClickException):
    exit_code = 1


class NetworkError(click.ClickException):
    exit_code = 3


def load_cli_config(path: Path = DEFAULT_CONFIG_PATH) -> dict[str, str]:
    values = {"url": "http://127.0.0.1:8787", "token": "", "output": "table"}
    if path.exists():
        mode = stat.S_IMODE(path.stat().st_mode)
        if mode & 0o077:
            click.echo(f"warning: {path} is readable by others", err=True)
        values.update(parse_config_text(path.read_text("utf-8")))
    if os.environ.get("QTRACE_URL"):
        values["url"] = os.environ["QTRACE_URL"]
    if os.environ.get("QTRACE_TOKEN"):
        values["token"] = os.environ["QTRACE_TOKEN"]
    return values


class Client:
    def __init__(self, url: str, token: str, as_json: bool):
        self.url = url.rstrip("/")
        self.token = token
        self.as_json = as_json

    def request(self, method: str, path: str, **kwargs) -> tuple[int, str]:
        headers = {"Authorization": f"Bearer {self.token}"}
        try:
            response = httpx.request(
                method, f"{self.url}{path}", headers=headers, timeout=30.0, **kwargs
            )
        except httpx.TransportError as exc:
            raise NetworkError(f"cannot reach {self.url}: {exc}")
        if response.status_code >= 400:
            try:
                message = response.json().get("message", response.text)
            except ValueError:
                message = response.text
            raise CliError(message)
        return response.status_code, response.text

    def call(self, method: str, path: str, **kwargs) -> dict:
        _, text = self.request(method, path, **kwargs)
        if self.as_json:
            # json mode passes the raw response body through unchanged
            click.echo(text, nl=False)
            click.echo()
            return {}
        return json.loads(text) if text else {}


pass_client = click.make_pass_decorator(Client)


@click.group()
@click.option("--json", "as_json", is_flag=True, help="emit raw API responses")
@click.option("--url", default=None, help="server URL (overrides config)")
@click.pass_context
def main(ctx, as_json, url):
    """Capture and track architecture questions from the terminal."""
    values = load_cli_config()
    if values.get("output") == "json":
        as_json = True
    ctx.obj = Client(url or values["url"], values["token"], as_json)


@main.command()
@click.argument("title")
@click.option("--body", default="", help="question body text")
@click.option("--visibility", default="team", type=click.Choice(["public", "team", "restricted"]))
@click.option("--tag", "tags", multiple=True)
@pass_client
def ask(client, title, body, visibility, tags):
    """Register a question in one shot."""
    data = client.call(
        "POST",
        "/questions",
        json={"title": title, "body": body, "visibility": visibility, "tags": list(tags)},
    )
    if not data:
        return
    question = data["question"]
    click.echo(question["id"])
    for dup in data["similar"]["duplicates"]:
        click.echo(f"possible duplicate: {dup['question_id']} (score {dup['score']:.2f})", err=True)
    if data.get("ambiguity"):
        reasons = ", ".join(data["ambiguity"]["reasons"])
        click.echo(f"ambiguity: {reasons}", err=True)


@main.command("list")
@click.option("--status", default=None, type=click.Choice(["active", "resolved", "assumed", "archived"]))
@click.option("--category", default=None)
@click.option("--min-score", default=None, type=int)
@pass_client
def list_cmd(client, status, category, min_score):
    """Show the backlog, optionally filtered."""
    params = {k: v for k, v in (("status", status), ("category", category), ("min_score", min_score)) if v is not None}
    data = client.call("GET", "/questions", params=params)
    if not data:
        return
    for q in data["questions"]:
        score = q["priority"]["score"] if q["priority"] else "-"
        click.echo(f"{q['id']}  [{q['state']}] score={score}  {q['title']}")


@main.command()
@click.argument("question_id")
@pass_client
def show(client, question_id):
    """Show one question with comments and decisions."""
    data = client.call("GET", f"/questions/{question_id}")
    if not data:
        return
    q = data["question"]
    click.echo(f"{q['title']}  ({q['id']})")
    click.echo(f"state: {q['state']}  status: {q['status']}  version: {q['version']}")
    if q["priority"]:
        p = q["priority"]
        click.echo(f"priority: urgency={p['urgency']} impact={p['impact']} score={p['score']}")
    if q["categories"]:
        click.echo("categories: " + ", ".join(q["categories"]))
    if q["body"]:
        click.echo(q["body"])
    for c in data["comments"]:
        click.echo(f"  [{c['state_at_posting']}] {c['author']}: {c['body']}")
    for d in data["decisions"]:
        click.echo(f"  decision {d['id']}: {d['outcome']} — {d['rationale']}")


@main.command()
@click.argument("action")
@click.argument("question_id")
@click.option("--urgency", type=int, default=None)
@click.option("--impact", type=int, default=None)
@click.option("--expected-version", type=int, default=None)
@pass_client
def act(client, action, question_id, urgency, impact, expected_version):
    """Apply a lifecycle action (submit, prioritize, archive, ...)."""
    payload = {}
    if urgency is not None:
        payload["urgency"] = urgency
    if impact is not None:
        payload["impact"] = impact
    body = {"action": action, "payload": payload}
    if expected_version is not None:
        body["expected_version"] = expected_version
    data = client.call("POST", f"/questions/{question_id}/transitions", json=body)
    if data:
        click.echo(f"{question_id} -> {data['question']['state']}")


@main.command()
@click.argument("outcome", type=click.Choice(["resolved", "assumed", "unanswered"]))
@click.argument("question_id")
@click.option("--rationale", default="")
@click.option("--reason", default="")
@click.option("--option", "chosen_option", default="")
@click.option("--considered", multiple=True)
@click.option("--contributor", "contributors", multiple=True)
@pass_client
def decide(client, outcome, question_id, rationale, reason, chosen_option, considered, contributors):
    """Decide a question in discussion: resolved, assumed, or unanswered."""
    payload = {
        "outcome": outcome,
        "rationale": rationale,
        "reason": reason,
        "chosen_option": chosen_option,
        "considered_options": list(considered),
        "contributors": list(contributors),
    }
    data = client.call(
        "POST", f"/questions/{question_id}/transitions", json={"action": "decide", "payload": payload}
    )
    if data:
        click.echo(f"{question_id} -> {data['question']['state']}")


@main.command()
@click.argument("keywords", nargs=-1)
@click.option("--status", default=None)
@click.option("--state", default=None)
@click.option("--category", default=None)
@click.option("--min-score", default=None, type=int)
@pass_client
def search(client, keywords, status, state, category, min_score):
    """Keyword search with filters (conjunctive)."""
    params = {"q": " ".join(keywords)}
    for key, value in (("status", status), ("state", state), ("category", category), ("min_score", min_score)):
        if value is not None:
            params[key] = value
    data = client.call("GET", "/search", params=params)
    if not data:
        return
    for row in data["results"]:
        click.echo(row["question_id"])


@main.command()
@click.argument("question_id")
@click.option("--threshold", type=float, default=None)
@click.option("-k", type=int, default=5)
@pass_client
def similar(client, question_id, threshold, k):
    """Rank similar questions and flag likely duplicates."""
    params = {"k": k}
    if threshold is not None:
        params["threshold"] = threshold
    data = client.call("GET", f"/questions/{question_id}/similar", params=params)
    if not data:
        return
    for row in data["neighbors"]:
        dup = " DUPLICATE" if row["score"] >= data["threshold"] else ""
        click.echo(f"{row['question_id']}  {row['score']:.4f}{dup}")


@main.command()
@click.argument("question_id")
@click.option("--off", is_flag=True, help="stop watching")
@pass_client
def watch(client, question_id, off):
    """Watch or unwatch a question."""
    data = client.call("POST", f"/questions/{question_id}/watch", json={"watch": not off})
    if data:
        click.echo(", ".join(data["watchers"]))


@main.command()
@click.argument("question_id")
@click.argument("body")
@pass_client
def comment(client, question_id, body):
    """Comment on a question (supports @mentions)."""
    data = client.call("POST", f"/questions/{question_id}/comments", json={"body": body})
    if data:
        click.echo(data["comment"]["id"])


@main.command()
@click.argument("question_id")
@click.argument("file_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--media-type", default="application/octet-stream")
@click.option("--extracted-text", default=None, help="externally produced text sidecar")
@pass_client
def attach(client, question_id, file_path, media_type, extracted_text):
    """Attach a file (with optional extracted-text sidecar)."""
    raw = Path(file_path).read_bytes()
    body = {
        "filename": Path(file_path).name,
        "media_type": media_type,
        "content_base64": base64.b64encode(raw).decode("ascii"),
    }
    if extracted_text is not None:
        body["extracted_text"] = extracted_text
    data = client.call("POST", f"/questions/{question_id}/attachments", json=body)
    if data:
        click.echo(data["attachment"]["id"])


@main.command("import-transcript")
@click.argument("file_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--source", default=None)
@click.option("--confirm", is_flag=True, help="register every extracted draft")
@pass_client
def import_transcript(client, file_path, source, confirm):
    """Extract question drafts from a pre-transcribed meeting document."""
    text = Path(file_path).read_text("utf-8")
    source = source or Path(file_path).name
    data = client.call("POST", "/imports/transcript", json={"text": text, "source": source})
    if not data:
        return
    for draft in data["drafts"]:
        click.echo(f"[{draft['confidence']}] @{draft['offset_ms']}ms  {draft['title']}")
        if confirm:
            created = client.call(
                "POST",
                "/questions",
                json={
                    "title": draft["title"],
                    "body": draft["body"],
                    "tags": [f"source:{draft['source']}"],
                    "provenance": {
                        "source": draft["source"],
                        "offset_ms": draft["offset_ms"],
                        "confidence": draft["confidence"],
                    },
                },
            )
            if created:
                click.echo(f"  -> {created['question']['id']}")


@main.group()
def adr():
    """Architecture-decision-record exports."""


@adr.command("export")
@click.argument("decision_id")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@pass_client
def adr_export(client, decision_id, out_dir):
    """Export one decision as a plain-text ADR document."""
    _, text = client.request("GET", f"/decisions/{decision_id}/adr")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"adr-{decision_id}.txt"
        path.write_text(text, "utf-8")
        click.echo(str(path))
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--unread", is_flag=True)
@pass_client
def notifications(client, unread):
    """Show the notification inbox."""
    data = client.call("GET", "/notifications", params={"unread": unread})
    if not data:
        return
    for n in data["notifications"]:
        marker = " " if n["read"] else "*"
        click.echo(f"{marker} [{n['kind']}] question {n['question_id']} (event {n['seq']})")


@main.group()
def admin():
    """Administration (operates on the store's users file directly)."""


@admin.group()
def user():
    """User management."""


@user.command("add")
@click.argument("user_id")
@click.option("--name", default=None)
@click.option("--role", "roles", multiple=True, required=True,
              type=click.Choice(["question_owner", "product_owner", "developer_researcher",
                                 "decision_maker", "admin"]))
@click.option("--clearance", default="team", type=click.Choice(["public", "team", "restricted"]))
@click.option("--token", default=None, help="bearer token to provision (hashed at rest)")
@click.option("--users-file", default=None, type=click.Path(),
              help="users file (defaults to $QTRACE_TOKENS)")
def user_add(user_id, name, roles, clearance, token, users_file):
    """Provision a user and bearer token in the users file."""
    path = users_file or os.environ.get("QTRACE_TOKENS")
    if not path:
        raise click.UsageError("pass --users-file or set QTRACE_TOKENS")
    path = Path(path)
    data = {"users": []}
    if path.exists():
        data = json.loads(path.read_text("utf-8"))
    data["users"] = [u for u in data["users"] if u["id"] != user_id]
    data["users"].append(
        {
            "id": user_id,
            "name": name or user_id,
            "roles": sorted(roles),
            "clearance": clearance,
            "token_hash": hash_token(token) if token else "",
        }
    )
    data["users"].sort(key=lambda u: u["id"])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", "utf-8")
    click.echo(f"user {user_id} written to {path}")


@user.command("role")
@click.argument("user_id")
@click.option("--add", "add_roles", multiple=True)
@click.option("--remove", "remove_roles", multiple=True)
@click.option("--users-file", default=None, type=click.Path())
def user_role(user_id, add_roles, remove_roles, users_file):
    """Adjust a user's roles in the users file."""
    path = Path(users_file or os.environ.get("QTRACE_TOKENS") or "")
    if not str(path):
        raise click.UsageError("pass --users-file or set QTRACE_TOKENS")
    data = json.loads(path.read_text("utf-8"))
    for row in data["users"]:
        if row["id"] == user_id:
            roles = set(row["roles"]) | set(add_roles)
            roles -= set(remove_roles)
            if not roles:
                raise CliError("a user must keep at least one role")
            row["roles"] = sorted(roles)
            break
    else:
        raise CliError(f"no user {user_id}")
    path.write_text(json.dumps(data, indent=2) + "\n", "utf-8")
    click.echo(f"user {user_id}: {', '.join(sorted(roles))}")


if __name__ == "__main__":
    main()
