// DOM wiring.  All logic lives in the testable modules; this file only
// moves data between them and the page.

import { ServiceApi } from './api.js';
import { compareSnapshots } from './deltas.js';
import { sensitivityBars, stageMitigation, topLeaf } from './panel.js';
import { convergenceProgress } from './progress.js';
import { buildScene, formatProbability, sceneToSvg } from './render.js';
import { AppStore, isStale } from './state.js';
import type { EvidenceValue, Technique } from './types.js';

const api = new ServiceApi('');
const store = new AppStore(api);

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const catalog = await api.catalog();
  const picker = el<HTMLSelectElement>('graph-picker');
  picker.innerHTML = catalog
    .map((g) => `<option value="${g.graph_id}">${g.name} (${g.n_nodes} nodes)</option>`)
    .join('');
  picker.onchange = () => void store.selectGraph(picker.value);
  if (catalog.length > 0 && catalog[0]) {
    await store.selectGraph(catalog[0].graph_id);
    const goal = store.state.graph?.goals[0];
    if (goal !== undefined) await store.loadSensitivity(goal);
    await store.runInference();
  }

  el<HTMLSelectElement>('technique').onchange = (event) => {
    store.state.technique = (event.target as HTMLSelectElement).value as Technique;
    void store.runInference();
  };
  el<HTMLButtonElement>('pin-button').onclick = () => {
    try {
      store.pinSnapshot('pinned');
      render();
    } catch (error) {
      el('error-bar').textContent = String(error);
    }
  };
}

function render(): void {
  const state = store.state;
  el('error-bar').textContent = state.lastError ?? '';
  el('status-bar').textContent = state.running
    ? 'inference running…'
    : state.result
      ? `${state.result.technique} · ${state.result.n_raw.toLocaleString()} samples` +
        (state.result.converged ? '' : ' · NOT CONVERGED') +
        (isStale(state) ? ' · STALE (evidence changed)' : '')
      : 'no result yet';

  if (state.result) {
    const progress = convergenceProgress(state.result.trace, state.errorTarget);
    const bar = el<HTMLProgressElement>('progress');
    bar.value = progress.fraction;
  }

  const graph = state.graph;
  if (!graph) return;
  const scene = buildScene(graph, state);
  el('canvas').innerHTML = sceneToSvg(scene);
  for (const group of el('canvas').querySelectorAll<SVGGElement>('g.node')) {
    group.onclick = () => {
      const nodeId = Number(group.dataset.node);
      const next: EvidenceValue =
        store.evidenceValue(nodeId) === 'unset'
          ? 'y'
          : store.evidenceValue(nodeId) === 'y'
            ? 'n'
            : 'unset';
      void store.toggleEvidence(nodeId, next);
    };
  }

  const bars = sensitivityBars(state.sensitivity);
  el('sensitivity-panel').innerHTML = bars
    .map(
      (bar) =>
        `<div class="bar-row" data-leaf="${bar.leaf}">` +
        `<span class="bar-label">${bar.label}</span>` +
        `<div class="bar" style="width:${(bar.widthFraction * 100).toFixed(1)}%"></div></div>`,
    )
    .join('');
  for (const row of el('sensitivity-panel').querySelectorAll<HTMLElement>('.bar-row')) {
    row.onclick = () => {
      const staged = stageMitigation(Number(row.dataset.leaf));
      void store.toggleEvidence(staged.nodeId, staged.value);
    };
  }
  const top = topLeaf(state.sensitivity);
  el('top-leaf').textContent = top === null ? '' : `most critical leaf: ${top}`;

  if (state.pinned && state.result && !isStale(state)) {
    const rows = compareSnapshots(state.pinned, store.currentSnapshot('current'));
    el('delta-table').innerHTML =
      '<tr><th>node</th><th>pinned</th><th>current</th><th>delta</th></tr>' +
      rows
        .slice(0, 12)
        .map(
          (row) =>
            `<tr><td>${row.id}</td><td>${formatProbability(row.pA)}</td>` +
            `<td>${formatProbability(row.pB)}</td>` +
            `<td>${row.delta >= 0 ? '+' : ''}${formatProbability(row.delta)}</td></tr>`,
        )
        .join('');
  }
}

store.subscribe(render);
void boot();
