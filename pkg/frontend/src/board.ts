import type { BacklogStatus, Question, SimilarityReport } from "./types";

export interface Card {
  id: string;
  title: string;
  stateBadge: string;
  priorityScore: number | null;
  categoryChips: string[];
  duplicateWarning: boolean;
}

export type Lanes = Record<BacklogStatus, Card[]>;

export interface BoardModel {
  lanes: Lanes;
  totalCards: number;
}

const LANE_ORDER: BacklogStatus[] = ["active", "resolved", "assumed", "archived"];

function toCard(q: Question, duplicateIds: Set<string>): Card {
  return {
    id: q.id,
    title: q.title,
    stateBadge: q.state.replace(/_/g, " "),
    priorityScore: q.priority ? q.priority.score : null,
    categoryChips: q.categories,
    duplicateWarning: duplicateIds.has(q.id),
  };
}

/**
 * Lanes mirror the server's status buckets exactly: each card lands in the
 * lane named by its own `status` field, so a card appears in exactly one lane.
 */
export function buildBoard(
  questions: Question[],
  duplicateReports: SimilarityReport[] = []
): BoardModel {
  const duplicateIds = new Set<string>();
  for (const report of duplicateReports) {
    if (report.duplicates.length > 0) duplicateIds.add(report.subject);
  }
  const lanes: Lanes = { active: [], resolved: [], assumed: [], archived: [] };
  for (const q of questions) {
    lanes[q.status].push(toCard(q, duplicateIds));
  }
  return { lanes, totalCards: questions.length };
}

export function laneOrder(): BacklogStatus[] {
  return [...LANE_ORDER];
}

/** Invariant check used by callers after rebuilds: lanes partition the cards. */
export function boardIsPartition(board: BoardModel): boolean {
  const ids = LANE_ORDER.flatMap((lane) => board.lanes[lane].map((c) => c.id));
  return ids.length === board.totalCards && new Set(ids).size === ids.length;
}
