import type { PreviewResponse } from "./types";

export interface DuplicateHint {
  questionId: string;
  score: number;
}

export interface NewQuestionDialogModel {
  /** Shown iff at least one neighbor crosses the server's threshold. */
  duplicateWarning: boolean;
  duplicates: DuplicateHint[];
  ambiguityFlags: string[];
  vagueTerms: string[];
}

/** Live feedback while drafting, driven entirely by POST /drafts/preview. */
export function buildDialog(preview: PreviewResponse): NewQuestionDialogModel {
  const duplicates = preview.similar.neighbors
    .filter((n) => n.score >= preview.similar.threshold)
    .map((n) => ({ questionId: n.question_id, score: n.score }));
  return {
    duplicateWarning: duplicates.length > 0,
    duplicates,
    ambiguityFlags: preview.ambiguity ? preview.ambiguity.reasons : [],
    vagueTerms: preview.ambiguity ? preview.ambiguity.vague_hits : [],
  };
}
