// Sensitivity panel: ranked bars; clicking a leaf stages a mitigation
// (observe it off) as the next what-if toggle.

import type { SensitivityOut } from './types.js';

export interface BarRow {
  leaf: number;
  sensitivity: number;
  widthFraction: number; // relative to the top entry
  label: string;
}

export function sensitivityBars(report: SensitivityOut | null): BarRow[] {
  if (!report || report.entries.length === 0) return [];
  const top = Math.max(report.entries[0]?.sensitivity ?? 0, 1e-12);
  return report.entries.map((entry) => ({
    leaf: entry.leaf,
    sensitivity: entry.sensitivity,
    widthFraction: Math.max(entry.sensitivity, 0) / top,
    label: `${entry.leaf}: ${entry.sensitivity.toFixed(4)}`,
  }));
}

export function topLeaf(report: SensitivityOut | null): number | null {
  return report?.entries[0]?.leaf ?? null;
}

export function stageMitigation(leaf: number): { nodeId: number; value: 'n' } {
  return { nodeId: leaf, value: 'n' };
}
