import type { Question } from "./types";

export interface ActionButton {
  action: string;
  label: string;
  /** Which extra form the button opens, if any. */
  form: "decide" | "prioritize" | null;
}

export interface DecideForm {
  outcomes: ["resolved", "assumed", "unanswered"];
  fields: ["outcome", "chosen_option", "considered_options", "rationale", "contributors"];
}

export interface PrioritizeForm {
  /** 5x5 urgency/impact picker: every (urgency, impact) pair with its score. */
  matrix: { urgency: number; impact: number; score: number }[];
}

export interface ActionPanelModel {
  questionId: string;
  expectedVersion: number;
  buttons: ActionButton[];
  decideForm: DecideForm | null;
  prioritizeForm: PrioritizeForm | null;
}

const DECIDE_ACTIONS = new Set(["decide_resolved", "decide_assumed", "decide_unanswered"]);

const LABELS: Record<string, string> = {
  submit: "Submit for clarification",
  mark_clarified: "Mark clarified",
  prioritize: "Prioritize",
  submit_findings: "Submit findings",
  request_research: "Request more research",
  decide_resolved: "Decide: resolved",
  decide_assumed: "Decide: assumed",
  decide_unanswered: "Decide: unanswered",
  manage_uncertainty: "Manage uncertainty",
  archive: "Archive",
  reemerge: "Re-open for research",
};

/**
 * Buttons derive solely from the server's allowed_actions response; the
 * panel carries no client-side permission logic.
 */
export function buildActionPanel(question: Question, allowedActions: string[]): ActionPanelModel {
  const ordered = [...allowedActions].sort();
  const buttons: ActionButton[] = ordered.map((action) => ({
    action,
    label: LABELS[action] ?? action,
    form: DECIDE_ACTIONS.has(action) ? "decide" : action === "prioritize" ? "prioritize" : null,
  }));
  const hasDecide = buttons.some((b) => b.form === "decide");
  const hasPrioritize = buttons.some((b) => b.form === "prioritize");
  const matrix: PrioritizeForm["matrix"] = [];
  if (hasPrioritize) {
    for (let urgency = 1; urgency <= 5; urgency++) {
      for (let impact = 1; impact <= 5; impact++) {
        matrix.push({ urgency, impact, score: urgency * impact });
      }
    }
  }
  return {
    questionId: question.id,
    expectedVersion: question.version,
    buttons,
    decideForm: hasDecide
      ? {
          outcomes: ["resolved", "assumed", "unanswered"],
          fields: ["outcome", "chosen_option", "considered_options", "rationale", "contributors"],
        }
      : null,
    prioritizeForm: hasPrioritize ? { matrix } : null,
  };
}
