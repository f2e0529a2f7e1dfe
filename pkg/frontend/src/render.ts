// Pure scene construction for the graph view; DOM/SVG handling stays in
// main.ts so everything here is unit-testable.

import { probabilityColor } from './colors.js';
import { layoutGraph, shapeFor } from './layout.js';
import type { ViewState } from './state.js';
import { isStale } from './state.js';
import type { GraphDetail, PosteriorRow } from './types.js';

export interface NodeView {
  id: number;
  label: string;
  shape: 'rect' | 'ellipse' | 'diamond';
  x: number;
  y: number;
  fill: string;
  isGoal: boolean;
  evidenceBadge: 'y' | 'n' | null;
  pText: string; // always 4 decimal places
  stderrText: string;
  zeroStderr: boolean;
  unconverged: boolean;
  stale: boolean;
}

export interface EdgeView {
  from: { x: number; y: number };
  to: { x: number; y: number };
}

export interface Scene {
  width: number;
  height: number;
  nodes: NodeView[];
  edges: EdgeView[];
}

export function posteriorIndex(result: { posteriors: PosteriorRow[] } | null) {
  return new Map((result?.posteriors ?? []).map((row) => [row.id, row]));
}

export function formatProbability(p: number): string {
  return p.toFixed(4);
}

export function buildScene(graph: GraphDetail, state: ViewState): Scene {
  const layout = layoutGraph(graph);
  const posteriors = posteriorIndex(state.result);
  const stale = isStale(state);
  const unconverged = state.result !== null && !state.result.converged;
  const goals = new Set(graph.goals);

  const nodes: NodeView[] = graph.nodes.map((node) => {
    const position = layout.positions.get(node.id);
    if (!position) throw new Error(`node ${node.id} missing from layout`);
    const posterior = posteriors.get(node.id);
    const evidence = state.evidence[node.id];
    return {
      id: node.id,
      label: node.label || `node ${node.id}`,
      shape: shapeFor(node.type),
      x: position.x,
      y: position.y,
      fill: posterior ? probabilityColor(posterior.p) : '#cccccc',
      isGoal: goals.has(node.id),
      evidenceBadge: evidence === undefined ? null : evidence ? 'y' : 'n',
      pText: posterior ? formatProbability(posterior.p) : '-',
      stderrText: posterior ? `±${formatProbability(posterior.stderr)}` : '',
      zeroStderr: posterior !== undefined && posterior.stderr === 0,
      unconverged,
      stale,
    };
  });

  const positions = layout.positions;
  const edges: EdgeView[] = graph.edges.flatMap(([src, dst]) => {
    const from = positions.get(src);
    const to = positions.get(dst);
    return from && to
      ? [{ from: { x: from.x, y: from.y }, to: { x: to.x, y: to.y } }]
      : [];
  });

  return { width: layout.width, height: layout.height, nodes, edges };
}

export function sceneToSvg(scene: Scene): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${scene.width} ${scene.height}">`,
  ];
  for (const edge of scene.edges) {
    parts.push(
      `<line x1="${edge.from.x + 40}" y1="${edge.from.y}" x2="${edge.to.x - 44}" ` +
        `y2="${edge.to.y}" stroke="#888" marker-end="url(#arrow)"/>`,
    );
  }
  for (const node of scene.nodes) {
    const outline = node.isGoal ? ' stroke="#000" stroke-width="3"' : ' stroke="#555"';
    const title = `${node.id}: ${escapeXml(node.label)} p=${node.pText} ${node.stderrText}`;
    parts.push(`<g data-node="${node.id}" class="node">`);
    if (node.shape === 'rect') {
      parts.push(
        `<rect x="${node.x - 40}" y="${node.y - 16}" width="80" height="32" rx="3" ` +
          `fill="${node.fill}"${outline}/>`,
      );
    } else if (node.shape === 'ellipse') {
      parts.push(
        `<ellipse cx="${node.x}" cy="${node.y}" rx="42" ry="17" fill="${node.fill}"${outline}/>`,
      );
    } else {
      const d = [
        `${node.x},${node.y - 18}`,
        `${node.x + 46},${node.y}`,
        `${node.x},${node.y + 18}`,
        `${node.x - 46},${node.y}`,
      ].join(' ');
      parts.push(`<polygon points="${d}" fill="${node.fill}"${outline}/>`);
    }
    if (node.evidenceBadge) {
      parts.push(
        `<circle cx="${node.x + 34}" cy="${node.y - 14}" r="9" ` +
          `fill="${node.evidenceBadge === 'y' ? '#2e7d32' : '#c62828'}"/>` +
          `<text x="${node.x + 34}" y="${node.y - 10}" text-anchor="middle" ` +
          `fill="#fff" font-size="11">${node.evidenceBadge}</text>`,
      );
    }
    parts.push(
      `<text x="${node.x}" y="${node.y + 4}" text-anchor="middle" font-size="11">` +
        `${node.id}</text>`,
    );
    parts.push(`<title>${title}</title>`);
    parts.push('</g>');
  }
  parts.push('</svg>');
  return parts.join('');
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
