import json
import socket
import threading
import time

import httpx
import pytest
import uvicorn
from click.testing import CliRunner

from conftest import STANDARD_USERS
from qtrace.api import create_app
from qtrace.cli import main
from qtrace.service import QuestionService, ServiceConfig


@pytest.fixture(scope="module")
def server(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-server")
    svc = QuestionService(ServiceConfig(store_dir=str(root / "store")))
    for user_id, roles, clearance in STANDARD_USERS:
        svc.add_user(None, user_id, user_id.title(), roles, clearance, token=f"token-{user_id}")

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]

    config = uvicorn.Config(create_app(svc), host="127.0.0.1", port=port, log_level="error")
    instance = uvicorn.Server(config)
    thread = threading.Thread(target=instance.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            httpx.get(f"{url}/healthz", timeout=1.0)
            break
        except httpx.TransportError:
            time.sleep(0.05)
    else:
        raise RuntimeError("server did not start")
    yield {"url": url, "service": svc, "users_file": svc.config.store_dir}
    instance.should_exit = True
    thread.join(timeout=5)


def run_cli(server, args, user="owner", **kwargs):
    env = {"QTRACE_URL": server["url"], "QTRACE_TOKEN": f"token-{user}"}
    return CliRunner().invoke(main, args, env=env, **kwargs)


def test_ask_prints_id(server):
    result = run_cli(server, ["ask", "Which queue backs retries?", "--body", "sqs or redis"])
    assert result.exit_code == 0, result.output
    qid = result.output.strip().splitlines()[0]
    assert len(qid) == 26


def test_ask_reports_duplicate_on_stderr(server):
    args = ["ask", "Should we pin base image digests everywhere?",
            "--body", "supply chain pinning for container base images"]
    assert run_cli(server, args).exit_code == 0
    result = run_cli(server, args)
    assert result.exit_code == 0
    assert "possible duplicate" in result.stderr


def test_list_and_show(server):
    created = run_cli(server, ["ask", "Which tracing backend?"])
    qid = created.output.strip().splitlines()[0]
    listing = run_cli(server, ["list"])
    assert qid in listing.output
    shown = run_cli(server, ["show", qid])
    assert "Which tracing backend?" in shown.output
    assert "state: formulated" in shown.output


def test_act_and_decide_flow(server):
    qid = run_cli(server, ["ask", "Which schema registry?"]).output.strip().splitlines()[0]
    assert run_cli(server, ["act", "submit", qid]).exit_code == 0
    assert run_cli(server, ["act", "mark_clarified", qid]).exit_code == 0
    result = run_cli(server, ["act", "prioritize", qid, "--urgency", "4", "--impact", "5"], user="po")
    assert result.exit_code == 0 and "priority_analysis -> research" not in result.output
    assert run_cli(server, ["act", "submit_findings", qid], user="dev").exit_code == 0
    decided = run_cli(server, ["decide", "resolved", qid, "--rationale", "fits the stack"],
                      user="dm")
    assert decided.exit_code == 0
    assert f"{qid} -> resolved" in decided.output


def test_act_invalid_transition_exit_1(server):
    qid = run_cli(server, ["ask", "Which linter?"]).output.strip().splitlines()[0]
    result = run_cli(server, ["act", "archive", qid])
    assert result.exit_code == 1


def test_stale_version_exit_1(server):
    qid = run_cli(server, ["ask", "Which formatter?"]).output.strip().splitlines()[0]
    result = run_cli(server, ["act", "submit", qid, "--expected-version", "42"])
    assert result.exit_code == 1


def test_usage_error_exit_2(server):
    result = run_cli(server, ["decide", "sideways", "someid"], user="dm")
    assert result.exit_code == 2


def test_network_error_exit_3(server):
    env = {"QTRACE_URL": "http://127.0.0.1:9", "QTRACE_TOKEN": "token-owner"}
    result = CliRunner().invoke(main, ["list"], env=env)
    assert result.exit_code == 3


def test_search_command(server):
    qid = run_cli(server, ["ask", "Where should feature flags live?",
                           "--body", "flag storage zebra"]).output.strip().splitlines()[0]
    result = run_cli(server, ["search", "zebra"], user="dev")
    assert result.exit_code == 0
    assert qid in result.output


def test_json_mode_passthrough(server):
    qid = run_cli(server, ["ask", "Which cdn?"]).output.strip().splitlines()[0]
    result = run_cli(server, ["--json", "show", qid])
    data = json.loads(result.output)
    assert data["question"]["id"] == qid
    # raw body, byte for byte, plus a trailing newline
    direct = httpx.get(f"{server['url']}/questions/{qid}",
                       headers={"Authorization": "Bearer token-owner"})
    assert result.output == direct.text + "\n"


def test_watch_and_notifications(server):
    qid = run_cli(server, ["ask", "Which dns provider?"]).output.strip().splitlines()[0]
    assert run_cli(server, ["watch", qid], user="dev").exit_code == 0
    assert run_cli(server, ["comment", qid, "any strong views?"]).exit_code == 0
    result = run_cli(server, ["notifications", "--unread"], user="dev")
    assert f"question {qid}" in result.output


def test_attach_command(server, tmp_path):
    qid = run_cli(server, ["ask", "Which load balancer?"]).output.strip().splitlines()[0]
    blob = tmp_path / "diagram.png"
    blob.write_bytes(b"\x89PNG fake")
    result = run_cli(server, ["attach", qid, str(blob), "--media-type", "image/png",
                              "--extracted-text", "edge pops"])
    assert result.exit_code == 0 and result.output.strip()


def test_import_transcript_confirm(server, tmp_path, transcript_text):
    path = tmp_path / "meeting.txt"
    path.write_text(transcript_text, "utf-8")
    preview = run_cli(server, ["import-transcript", str(path)])
    assert preview.exit_code == 0
    assert preview.output.count("[high]") == 5 and preview.output.count("[low]") == 2
    confirmed = run_cli(server, ["import-transcript", str(path), "--confirm"])
    assert confirmed.exit_code == 0
    assert confirmed.output.count("-> ") == 7


def test_adr_export_to_dir(server, tmp_path):
    qid = run_cli(server, ["ask", "Which metrics store?"]).output.strip().splitlines()[0]
    for user, args in (("owner", ["act", "submit", qid]),
                       ("owner", ["act", "mark_clarified", qid]),
                       ("po", ["act", "prioritize", qid, "--urgency", "2", "--impact", "2"]),
                       ("dev", ["act", "submit_findings", qid])):
        assert run_cli(server, args, user=user).exit_code == 0
    assert run_cli(server, ["decide", "assumed", qid, "--rationale", "prometheus"],
                   user="dm").exit_code == 0
    shown = run_cli(server, ["--json", "show", qid])
    decision_id = json.loads(shown.output)["decisions"][0]["id"]
    out_dir = tmp_path / "adrs"
    result = run_cli(server, ["adr", "export", decision_id, "--out-dir", str(out_dir)])
    assert result.exit_code == 0
    written = out_dir / f"adr-{decision_id}.txt"
    assert written.exists()
    assert "== Status ==\n  assumed" in written.read_text("utf-8")


def test_admin_user_add_and_role(tmp_path):
    users_file = tmp_path / "users.json"
    runner = CliRunner()
    result = runner.invoke(main, ["admin", "user", "add", "eve", "--role", "developer_researcher",
                                  "--token", "secret", "--users-file", str(users_file)])
    assert result.exit_code == 0
    data = json.loads(users_file.read_text("utf-8"))
    assert data["users"][0]["id"] == "eve"
    assert data["users"][0]["token_hash"] != "secret"  # stored hashed

    result = runner.invoke(main, ["admin", "user", "role", "eve", "--add", "product_owner",
                                  "--users-file", str(users_file)])
    assert result.exit_code == 0
    data = json.loads(users_file.read_text("utf-8"))
    assert data["users"][0]["roles"] == ["developer_researcher", "product_owner"]

    result = runner.invoke(main, ["admin", "user", "role", "eve",
                                  "--remove", "product_owner", "--remove", "developer_researcher",
                                  "--users-file", str(users_file)])
    assert result.exit_code == 1  # cannot strip the last role
