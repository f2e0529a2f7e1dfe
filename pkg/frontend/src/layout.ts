// Layered left-to-right DAG layout: a node's column is its longest
// distance from any parentless node, mirroring attack progression.

import type { GraphDetail, NodeKind } from './types.js';

export interface NodePosition {
  id: number;
  depth: number;
  row: number;
  x: number;
  y: number;
}

export interface Layout {
  positions: Map<number, NodePosition>;
  width: number;
  height: number;
}

export const COLUMN_SPACING = 150;
export const ROW_SPACING = 64;
export const MARGIN = 40;

export function nodeDepths(graph: GraphDetail): Map<number, number> {
  const parents = new Map<number, number[]>();
  for (const node of graph.nodes) parents.set(node.id, []);
  for (const [src, dst] of graph.edges) {
    parents.get(dst)?.push(src);
  }
  const depth = new Map<number, number>();
  const visiting = new Set<number>();
  const resolve = (id: number): number => {
    const known = depth.get(id);
    if (known !== undefined) return known;
    if (visiting.has(id)) throw new Error(`cycle at node ${id}`);
    visiting.add(id);
    const ps = parents.get(id) ?? [];
    const d = ps.length === 0 ? 0 : 1 + Math.max(...ps.map(resolve));
    visiting.delete(id);
    depth.set(id, d);
    return d;
  };
  for (const node of graph.nodes) resolve(node.id);
  return depth;
}

export function layoutGraph(graph: GraphDetail): Layout {
  const depths = nodeDepths(graph);
  const columns = new Map<number, number[]>();
  for (const node of graph.nodes) {
    const d = depths.get(node.id) ?? 0;
    const column = columns.get(d) ?? [];
    column.push(node.id);
    columns.set(d, column);
  }
  const positions = new Map<number, NodePosition>();
  let maxRows = 0;
  for (const [d, ids] of columns) {
    ids.sort((a, b) => a - b);
    maxRows = Math.max(maxRows, ids.length);
    ids.forEach((id, row) => {
      positions.set(id, {
        id,
        depth: d,
        row,
        x: MARGIN + d * COLUMN_SPACING,
        y: MARGIN + row * ROW_SPACING,
      });
    });
  }
  const maxDepth = Math.max(0, ...columns.keys());
  return {
    positions,
    width: 2 * MARGIN + maxDepth * COLUMN_SPACING + 100,
    height: 2 * MARGIN + Math.max(0, maxRows - 1) * ROW_SPACING + 40,
  };
}

// Drawing convention: facts are boxes, exploit steps ellipses, attacker
// states diamonds.
export function shapeFor(kind: NodeKind): 'rect' | 'ellipse' | 'diamond' {
  switch (kind) {
    case 'LEAF':
      return 'rect';
    case 'AND':
      return 'ellipse';
    case 'OR':
      return 'diamond';
  }
}
