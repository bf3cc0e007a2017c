import type { ApiClient } from "./client";
import type { Notification } from "./types";

export interface InboxModel {
  unreadCount: number;
  entries: Notification[];
}

export function buildInbox(notifications: Notification[]): InboxModel {
  const entries = [...notifications].sort((a, b) => b.seq - a.seq);
  return {
    unreadCount: entries.filter((n) => !n.read).length,
    entries,
  };
}

export const DEFAULT_POLL_INTERVAL_MS = 10_000;

type Timer = ReturnType<typeof setInterval>;

/** Poll-based inbox (no push in the v1 API); default interval 10 s. */
export class InboxPoller {
  private timer: Timer | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly onUpdate: (inbox: InboxModel) => void,
    private readonly intervalMs: number = DEFAULT_POLL_INTERVAL_MS
  ) {}

  async poll(): Promise<void> {
    const { notifications } = await this.client.getNotifications();
    this.onUpdate(buildInbox(notifications));
  }

  start(): void {
    if (this.timer !== null) return;
    void this.poll();
    this.timer = setInterval(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
