import { describe, expect, it } from "vitest";

import { buildLifecycleMap } from "../src/lifecycleMap";
import { buildTimeline } from "../src/timeline";
import type { TableRow, TraceEvent } from "../src/types";

function event(seq: number, kind: string, payload: Record<string, unknown>): TraceEvent {
  return {
    seq,
    question_id: "Q1",
    actor: "owner",
    kind,
    payload,
    at: 1700000000000 + seq,
    prev_hash: "0".repeat(64),
    hash: "f".repeat(64),
  };
}

describe("buildTimeline", () => {
  it("orders entries by sequence, oldest first", () => {
    const entries = buildTimeline([
      event(3, "commented", { body: "hm" }),
      event(1, "created", { title: "Which broker?" }),
      event(2, "transitioned", { action: "submit", from: "formulated", to: "clarification" }),
    ]);
    expect(entries.map((e) => e.seq)).toEqual([1, 2, 3]);
    expect(entries[0].summary).toContain("Which broker?");
  });

  it("shows the reemerge edge into research for a re-emerged question", () => {
    const entries = buildTimeline([
      event(7, "transitioned", { action: "reemerge", from: "resolved", to: "research" }),
    ]);
    expect(entries[0].fromState).toBe("resolved");
    expect(entries[0].toState).toBe("research");
    expect(entries[0].summary).toBe("reemerge: resolved → research");
  });

  it("summarizes every event kind", () => {
    const entries = buildTimeline([
      event(1, "created", { title: "T?" }),
      event(2, "prioritized", { action: "prioritize", from: "priority_analysis", to: "research", urgency: 3, impact: 4, score: 12 }),
      event(3, "commented", { comment_id: "c1", body: "note" }),
      event(4, "categorized", { categories: ["structure"] }),
      event(5, "attached", { filename: "topo.png" }),
      event(6, "watched", { op: "watch", user: "dev" }),
      event(7, "transitioned", { action: "submit_findings", from: "research", to: "discussion" }),
      event(8, "decision_recorded", { outcome: "resolved" }),
    ]);
    expect(entries.map((e) => e.summary)).toEqual([
      'raised "T?"',
      "prioritized urgency=3 impact=4 (score 12)",
      "commented: note",
      "categorized as structure",
      "attached topo.png",
      "started watching",
      "submit_findings: research → discussion",
      "decision recorded (resolved)",
    ]);
  });
});

describe("buildLifecycleMap", () => {
  const rows: TableRow[] = [
    { from: "formulated", action: "submit", to: "clarification", roles: ["question_owner"] },
    { from: "clarification", action: "mark_clarified", to: "priority_analysis", roles: ["question_owner"] },
    { from: "resolved", action: "reemerge", to: "research", roles: ["product_owner"] },
  ];

  it("derives nodes and edges from the served table only", () => {
    const map = buildLifecycleMap(rows);
    expect(map.edges).toHaveLength(3);
    expect(map.nodes.map((n) => n.state)).toEqual([
      "formulated",
      "clarification",
      "priority_analysis",
      "resolved",
      "research",
    ]);
  });

  it("highlights exactly the current state", () => {
    const map = buildLifecycleMap(rows, "research");
    expect(map.nodes.filter((n) => n.current).map((n) => n.state)).toEqual(["research"]);
  });
});
