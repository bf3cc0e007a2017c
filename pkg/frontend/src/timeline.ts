import type { TraceEvent } from "./types";

export interface TimelineEntry {
  seq: number;
  at: number;
  actor: string;
  kind: string;
  summary: string;
  fromState: string | null;
  toState: string | null;
}

function str(value: unknown): string {
  return typeof value === "string" ? value : "";
}

function summarize(event: TraceEvent): string {
  const p = event.payload;
  switch (event.kind) {
    case "created":
      return `raised "${str(p.title)}"`;
    case "transitioned":
      return `${str(p.action)}: ${str(p.from)} → ${str(p.to)}`;
    case "prioritized":
      return `prioritized urgency=${p.urgency} impact=${p.impact} (score ${p.score})`;
    case "commented":
      return `commented: ${str(p.body)}`;
    case "categorized":
      return `categorized as ${(p.categories as string[] | undefined)?.join(", ") ?? ""}`;
    case "attached":
      return `attached ${str(p.filename)}`;
    case "decision_recorded":
      return `decision recorded (${str(p.outcome)})`;
    case "watched":
      return `${str(p.op) === "unwatch" ? "stopped watching" : "started watching"}`;
    default:
      return event.kind;
  }
}

/** Lifecycle timeline rendered from GET /questions/{id}/trace, oldest first. */
export function buildTimeline(events: TraceEvent[]): TimelineEntry[] {
  return [...events]
    .sort((a, b) => a.seq - b.seq)
    .map((event) => {
      const p = event.payload;
      const moves = event.kind === "transitioned" || event.kind === "prioritized";
      return {
        seq: event.seq,
        at: event.at,
        actor: event.actor,
        kind: event.kind,
        summary: summarize(event),
        fromState: moves ? str(p.from) || null : null,
        toState: moves ? str(p.to) || null : null,
      };
    });
}
