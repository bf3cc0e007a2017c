// JSON shapes served by the qtrace HTTP API.

export type BacklogStatus = "active" | "resolved" | "assumed" | "archived";

export type LifecycleState =
  | "formulated"
  | "clarification"
  | "priority_analysis"
  | "research"
  | "discussion"
  | "resolved"
  | "assumed"
  | "unanswered"
  | "uncertainty_management"
  | "archived";

export interface Priority {
  urgency: number;
  impact: number;
  score: number;
  assigned_by: string;
  assigned_at: number;
}

export interface AttachmentInfo {
  id: string;
  filename: string;
  media_type: string;
  byte_size: number;
  content_hash: string;
  extracted_text: string | null;
}

export interface Question {
  id: string;
  title: string;
  body: string;
  author: string;
  created_at: number;
  state: LifecycleState;
  status: BacklogStatus;
  visibility: "public" | "team" | "restricted";
  priority: Priority | null;
  categories: string[];
  tags: string[];
  attachments: AttachmentInfo[];
  watchers: string[];
  version: number;
}

export interface Comment {
  id: string;
  question_id: string;
  author: string;
  body: string;
  posted_at: number;
  state_at_posting: LifecycleState;
}

export interface TraceEvent {
  seq: number;
  question_id: string;
  actor: string;
  kind: string;
  payload: Record<string, unknown>;
  at: number;
  prev_hash: string;
  hash: string;
}

export interface Neighbor {
  question_id: string;
  score: number;
}

export interface SimilarityReport {
  subject: string;
  threshold: number;
  neighbors: Neighbor[];
  duplicates: Neighbor[];
}

export interface AmbiguityFlag {
  question_id: string;
  reasons: string[];
  vague_hits: string[];
}

export interface DecisionRecord {
  id: string;
  question_id: string;
  outcome: "resolved" | "assumed" | "deferred";
  chosen_option: string;
  considered_options: string[];
  rationale: string;
  contributors: string[];
  decided_by: string;
  decided_at: number;
  supersedes: string | null;
}

export interface Notification {
  id: string;
  recipient: string;
  question_id: string;
  kind: string;
  seq: number;
  created_at: number;
  read: boolean;
}

export interface TableRow {
  from: LifecycleState;
  action: string;
  to: LifecycleState;
  roles: string[];
}

export interface QuestionDetail {
  question: Question;
  comments: Comment[];
  decisions: DecisionRecord[];
}

export interface CreateResponse {
  question: Question;
  similar: SimilarityReport;
  ambiguity: AmbiguityFlag | null;
}

export interface PreviewResponse {
  similar: SimilarityReport;
  ambiguity: AmbiguityFlag | null;
}
