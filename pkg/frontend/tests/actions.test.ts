import { describe, expect, it } from "vitest";

import { buildActionPanel } from "../src/actions";
import { makeQuestion, stubClient } from "./stub";

describe("buildActionPanel", () => {
  it("renders exactly the server's allowed_actions, nothing else", () => {
    const q = makeQuestion({ state: "discussion", version: 5 });
    const allowed = ["decide_resolved", "decide_assumed", "decide_unanswered", "request_research"];
    const panel = buildActionPanel(q, allowed);
    expect(panel.buttons.map((b) => b.action).sort()).toEqual([...allowed].sort());
    expect(panel.expectedVersion).toBe(5);
  });

  it("renders no buttons for a viewer with no allowed actions", () => {
    const panel = buildActionPanel(makeQuestion({ state: "discussion" }), []);
    expect(panel.buttons).toEqual([]);
    expect(panel.decideForm).toBeNull();
    expect(panel.prioritizeForm).toBeNull();
  });

  it("hides decide for non-decision-makers (server omits it)", () => {
    const panel = buildActionPanel(makeQuestion({ state: "discussion" }), ["request_research"]);
    expect(panel.buttons.some((b) => b.form === "decide")).toBe(false);
    expect(panel.decideForm).toBeNull();
  });

  it("decide buttons open the outcome form", () => {
    const panel = buildActionPanel(makeQuestion({ state: "discussion" }), [
      "decide_resolved",
      "request_research",
    ]);
    const decideButton = panel.buttons.find((b) => b.action === "decide_resolved");
    expect(decideButton?.form).toBe("decide");
    expect(panel.decideForm?.outcomes).toEqual(["resolved", "assumed", "unanswered"]);
    expect(panel.decideForm?.fields).toContain("rationale");
  });

  it("prioritize opens a full 5x5 urgency/impact matrix", () => {
    const panel = buildActionPanel(makeQuestion({ state: "priority_analysis" }), ["prioritize"]);
    const matrix = panel.prioritizeForm?.matrix ?? [];
    expect(matrix).toHaveLength(25);
    const scores = new Set(matrix.map((cell) => cell.score));
    expect(matrix.find((c) => c.urgency === 5 && c.impact === 5)?.score).toBe(25);
    expect(scores.has(1)).toBe(true);
    for (const cell of matrix) {
      expect(cell.score).toBe(cell.urgency * cell.impact);
    }
  });

  it("panel content derives from a live actions fetch, not local rules", async () => {
    const q = makeQuestion({ state: "discussion" });
    const { client } = stubClient([
      { path: `/questions/${q.id}/actions`, body: { actions: ["request_research"] } },
    ]);
    const { actions } = await client.getAllowedActions(q.id);
    const panel = buildActionPanel(q, actions);
    expect(panel.buttons.map((b) => b.action)).toEqual(["request_research"]);
  });
});
