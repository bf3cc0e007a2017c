"""Latency benchmark: builds a synthetic store and reports p50/p95 for
keyword search and lifecycle transitions (budgets: search < 50 ms,
transition < 10 ms at 10,000 questions)."""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import tempfile
import time

from .domain import Role, VisibilityLevel
from .lifecycle import LifecycleAction
from .service import QuestionService, ServiceConfig
from .store import SearchQuery

VOCABULARY = (
    "cache latency shard queue consistency deployment gateway index replica schema "
    "timeout retries throughput partition broker contract migration rollout telemetry "
    "encryption session quota backlog archive lease snapshot failover replication quorum "
    "ingress egress throttle batch stream ledger tenant region cluster scaling"
).split()


def build_store(service: QuestionService, n_questions: int, rng: random.Random) -> list[str]:
    ids = []
    base = int(time.time() * 1000) - n_questions
    for i in range(n_questions):
        title = f"Should we adjust {rng.choice(VOCABULARY)} for {rng.choice(VOCABULARY)}?"
        body = " ".join(rng.choices(VOCABULARY, k=12))
        from .domain import new_question

        draft = new_question("owner", title, body, VisibilityLevel.TEAM, created_at=base + i)
        service.store.emit(
            "created",
            draft.id,
            "owner",
            {"title": draft.title, "body": draft.body, "visibility": "team", "tags": []},
            draft.created_at,
        )
        ids.append(draft.id)
    return ids


def percentile(samples: list[float], q: float) -> float:
    return statistics.quantiles(samples, n=100)[int(q) - 1]


def run(n_questions: int, n_searches: int, n_transitions: int, store_dir: str, seed: int = 7):
    rng = random.Random(seed)
    service = QuestionService(ServiceConfig(store_dir=store_dir))
    service.add_user(None, "owner", "Owner", {Role.QUESTION_OWNER, Role.PRODUCT_OWNER})

    t0 = time.perf_counter()
    ids = build_store(service, n_questions, rng)
    build_s = time.perf_counter() - t0

    search_times = []
    for _ in range(n_searches):
        query = SearchQuery(keywords=tuple(rng.sample(VOCABULARY, rng.randint(1, 2))))
        start = time.perf_counter()
        service.search("owner", query)
        search_times.append((time.perf_counter() - start) * 1000)

    transition_times = []
    for qid in rng.sample(ids, min(n_transitions, len(ids))):
        start = time.perf_counter()
        service.transition("owner", qid, LifecycleAction.SUBMIT)
        transition_times.append((time.perf_counter() - start) * 1000)

    return {
        "questions": n_questions,
        "build_seconds": build_s,
        "search_p50_ms": statistics.median(search_times),
        "search_p95_ms": percentile(search_times, 95),
        "transition_p50_ms": statistics.median(transition_times),
        "transition_p95_ms": percentile(transition_times, 95),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qtrace-bench")
    parser.add_argument("--questions", type=int, default=10_000)
    parser.add_argument("--searches", type=int, default=200)
    parser.add_argument("--transitions", type=int, default=200)
    parser.add_argument("--store", default=None, help="store dir (default: temp)")
    args = parser.parse_args(argv)

    if args.store:
        results = run(args.questions, args.searches, args.transitions, args.store)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            results = run(args.questions, args.searches, args.transitions, tmp)

    print(f"questions:          {results['questions']}")
    print(f"store build:        {results['build_seconds']:.1f}s")
    print(f"search p50 / p95:   {results['search_p50_ms']:.2f} / {results['search_p95_ms']:.2f} ms")
    print(f"transition p50/p95: {results['transition_p50_ms']:.2f} / {results['transition_p95_ms']:.2f} ms")
    ok = results["search_p50_ms"] < 50 and results["transition_p50_ms"] < 10
    print("budget:             " + ("PASS" if ok else "FAIL") + " (search<50ms, transition<10ms)")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
