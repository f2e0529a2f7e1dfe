// What-if comparison of two pinned scenarios, biggest movement first.

import type { Snapshot } from './state.js';

export interface DeltaRow {
  id: number;
  pA: number;
  pB: number;
  delta: number; // pB - pA
}

export function compareSnapshots(a: Snapshot, b: Snapshot): DeltaRow[] {
  const byIdA = new Map(a.result.posteriors.map((row) => [row.id, row.p]));
  const rows: DeltaRow[] = [];
  for (const row of b.result.posteriors) {
    const pA = byIdA.get(row.id);
    if (pA === undefined) continue;
    rows.push({ id: row.id, pA, pB: row.p, delta: row.p - pA });
  }
  rows.sort((x, y) => Math.abs(y.delta) - Math.abs(x.delta) || x.id - y.id);
  return rows;
}

export function deltaFor(rows: DeltaRow[], nodeId: number): DeltaRow | undefined {
  return rows.find((row) => row.id === nodeId);
}
