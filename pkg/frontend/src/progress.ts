// Convergence progress from the trace: how close the worst traced node's
// standard error is to the target, on a 0..1 scale.

import type { TracePoint } from './types.js';

export interface ProgressView {
  fraction: number; // 1 when the target is met
  nRaw: number;
  latestStderr: number | null;
}

export function convergenceProgress(
  trace: TracePoint[],
  targetError: number,
): ProgressView {
  if (trace.length === 0) return { fraction: 0, nRaw: 0, latestStderr: null };
  const latest = trace[trace.length - 1] as TracePoint;
  const worst = Math.max(...latest.nodes.map((node) => node.stderr));
  if (!Number.isFinite(worst) || worst <= 0) {
    return { fraction: 1, nRaw: latest.n_raw, latestStderr: worst };
  }
  // stderr shrinks like 1/sqrt(n): express progress in sample terms
  const ratio = targetError / worst;
  return {
    fraction: Math.min(1, ratio * ratio),
    nRaw: latest.n_raw,
    latestStderr: worst,
  };
}
