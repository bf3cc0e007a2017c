import type { LifecycleState, TableRow } from "./types";

export interface MapNode {
  state: LifecycleState;
  current: boolean;
}

export interface MapEdge {
  from: LifecycleState;
  action: string;
  to: LifecycleState;
  roles: string[];
}

export interface LifecycleMapModel {
  nodes: MapNode[];
  edges: MapEdge[];
}

/**
 * Rendered from GET /lifecycle/table — never hard-coded — so engine changes
 * propagate automatically. `currentState` highlights one node.
 */
export function buildLifecycleMap(
  rows: TableRow[],
  currentState: LifecycleState | null = null
): LifecycleMapModel {
  const states: LifecycleState[] = [];
  const seen = new Set<string>();
  for (const row of rows) {
    for (const state of [row.from, row.to]) {
      if (!seen.has(state)) {
        seen.add(state);
        states.push(state);
      }
    }
  }
  return {
    nodes: states.map((state) => ({ state, current: state === currentState })),
    edges: rows.map((row) => ({
      from: row.from,
      action: row.action,
      to: row.to,
      roles: row.roles,
    })),
  };
}
