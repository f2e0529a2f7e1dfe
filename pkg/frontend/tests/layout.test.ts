import { describe, expect, it } from 'vitest';

import { layoutGraph, nodeDepths, shapeFor } from '../src/layout.js';
import { graphDetail } from './helpers.js';

describe('nodeDepths', () => {
  it('gives leaves depth zero', () => {
    const depths = nodeDepths(graphDetail);
    for (const node of graphDetail.nodes) {
      if (node.type === 'LEAF') expect(depths.get(node.id)).toBe(0);
    }
  });

  it('places every node below its parents', () => {
    const depths = nodeDepths(graphDetail);
    for (const [src, dst] of graphDetail.edges) {
      expect(depths.get(dst)!).toBeGreaterThan(depths.get(src)!);
    }
  });

  it('puts the goal at maximum depth in the running example', () => {
    const depths = nodeDepths(graphDetail);
    const max = Math.max(...depths.values());
    expect(depths.get(1)).toBe(max);
  });
});

describe('layoutGraph', () => {
  it('positions all 25 nodes without overlap within a column', () => {
    const layout = layoutGraph(graphDetail);
    expect(layout.positions.size).toBe(25);
    const seen = new Set<string>();
    for (const pos of layout.positions.values()) {
      const key = `${pos.x},${pos.y}`;
      expect(seen.has(key)).toBe(false);
      seen.add(key);
    }
  });

  it('orders rows within a column by ascending node id', () => {
    const layout = layoutGraph(graphDetail);
    const byDepth = new Map<number, { id: number; row: number }[]>();
    for (const pos of layout.positions.values()) {
      const column = byDepth.get(pos.depth) ?? [];
      column.push({ id: pos.id, row: pos.row });
      byDepth.set(pos.depth, column);
    }
    for (const column of byDepth.values()) {
      const sorted = [...column].sort((a, b) => a.id - b.id);
      expect(column.map((c) => c.row)).toEqual(sorted.map((_, i) => i));
    }
  });
});

describe('shapeFor', () => {
  it('follows the drawing convention', () => {
    expect(shapeFor('LEAF')).toBe('rect');
    expect(shapeFor('AND')).toBe('ellipse');
    expect(shapeFor('OR')).toBe('diamond');
  });
});
