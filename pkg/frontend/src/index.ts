export { ApiClient, ApiError } from "./client";
export type { FetchLike } from "./client";
export { buildBoard, boardIsPartition, laneOrder } from "./board";
export type { BoardModel, Card, Lanes } from "./board";
export { buildActionPanel } from "./actions";
export type { ActionPanelModel, ActionButton } from "./actions";
export { buildDialog } from "./dialog";
export type { NewQuestionDialogModel } from "./dialog";
export { buildTimeline } from "./timeline";
export type { TimelineEntry } from "./timeline";
export { buildLifecycleMap } from "./lifecycleMap";
export type { LifecycleMapModel } from "./lifecycleMap";
export { buildInbox, InboxPoller, DEFAULT_POLL_INTERVAL_MS } from "./inbox";
export type { InboxModel } from "./inbox";
export * from "./types";
