import type {
  Comment,
  CreateResponse,
  Notification,
  PreviewResponse,
  Question,
  QuestionDetail,
  SimilarityReport,
  TableRow,
  TraceEvent,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed wrapper over the JSON API; all UI state derives from it. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = fetch
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    });
    if (!response.ok) {
      let code = "HTTP_ERROR";
      let message = response.statusText;
      try {
        const payload = await response.json();
        code = payload.code ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return response.json() as Promise<T>;
  }

  listQuestions(filters: { status?: string; category?: string; min_score?: number } = {}) {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value !== undefined) params.set(key, String(value));
    }
    const qs = params.toString();
    return this.request<{ questions: Question[] }>("GET", `/questions${qs ? `?${qs}` : ""}`);
  }

  getQuestion(id: string) {
    return this.request<QuestionDetail>("GET", `/questions/${encodeURIComponent(id)}`);
  }

  getTrace(id: string) {
    return this.request<{ events: TraceEvent[] }>(
      "GET",
      `/questions/${encodeURIComponent(id)}/trace`
    );
  }

  getAllowedActions(id: string) {
    return this.request<{ actions: string[] }>(
      "GET",
      `/questions/${encodeURIComponent(id)}/actions`
    );
  }

  getSimilar(id: string) {
    return this.request<SimilarityReport>(
      "GET",
      `/questions/${encodeURIComponent(id)}/similar`
    );
  }

  previewDraft(title: string, body: string) {
    return this.request<PreviewResponse>("POST", "/drafts/preview", { title, body });
  }

  createQuestion(payload: { title: string; body: string; visibility?: string; tags?: string[] }) {
    return this.request<CreateResponse>("POST", "/questions", payload);
  }

  applyAction(id: string, action: string, payload: Record<string, unknown>, expectedVersion?: number) {
    const body: Record<string, unknown> = { action, payload };
    if (expectedVersion !== undefined) body.expected_version = expectedVersion;
    return this.request<{ question: Question }>(
      "POST",
      `/questions/${encodeURIComponent(id)}/transitions`,
      body
    );
  }

  addComment(id: string, body: string) {
    return this.request<{ comment: Comment }>(
      "POST",
      `/questions/${encodeURIComponent(id)}/comments`,
      { body }
    );
  }

  search(q: string, filters: { status?: string; state?: string } = {}) {
    const params = new URLSearchParams({ q });
    for (const [key, value] of Object.entries(filters)) {
      if (value !== undefined) params.set(key, value);
    }
    return this.request<{ results: { question_id: string; keywords: string[] }[] }>(
      "GET",
      `/search?${params.toString()}`
    );
  }

  getNotifications(unreadOnly = false) {
    return this.request<{ notifications: Notification[] }>(
      "GET",
      `/notifications${unreadOnly ? "?unread=true" : ""}`
    );
  }

  markRead(notificationId: string) {
    return this.request<{ ok: boolean }>(
      "POST",
      `/notifications/${encodeURIComponent(notificationId)}/read`
    );
  }

  getLifecycleTable() {
    return this.request<{ rows: TableRow[] }>("GET", "/lifecycle/table");
  }
}
