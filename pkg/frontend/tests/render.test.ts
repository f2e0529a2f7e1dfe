// Drives the full view model against recorded service data, covering the
// what-if round trip this client exists for: observing the database
// vulnerability absent forces the goal posterior to exactly zero.

import { beforeEach, describe, expect, it } from 'vitest';

import { compareSnapshots, deltaFor } from '../src/deltas.js';
import { topLeaf } from '../src/panel.js';
import { buildScene, sceneToSvg } from '../src/render.js';
import { AppStore } from '../src/state.js';
import { FakeApi, graphDetail, inferExactEmpty, sensitivityExact } from './helpers.js';

let api: FakeApi;
let store: AppStore;

beforeEach(async () => {
  api = new FakeApi();
  store = new AppStore(api);
  await store.selectGraph('g1');
  store.state.technique = 'exact';
});

describe('what-if round trip on the bundled example', () => {
  it('renders goal posterior 0.0000 with a zero-stderr badge for 17=n', async () => {
    await store.toggleEvidence(17, 'n');
    const scene = buildScene(graphDetail, store.state);
    const goal = scene.nodes.find((n) => n.id === 1)!;
    expect(goal.isGoal).toBe(true);
    expect(goal.pText).toBe('0.0000');
    expect(goal.zeroStderr).toBe(true);
    expect(goal.stale).toBe(false);
    const leaf17 = scene.nodes.find((n) => n.id === 17)!;
    expect(leaf17.evidenceBadge).toBe('n');
    expect(leaf17.shape).toBe('rect');
  });

  it('snapshot comparison shows the goal delta equal to minus the prior goal probability', async () => {
    await store.runInference(); // empty evidence baseline
    const baseline = store.pinSnapshot('baseline');
    await store.toggleEvidence(17, 'n');
    const rows = compareSnapshots(baseline, store.currentSnapshot('mitigated'));
    const goalRow = deltaFor(rows, 1)!;
    const goalPrior = inferExactEmpty.posteriors.find((r) => r.id === 1)!.p;
    expect(goalRow.delta).toBe(-goalPrior);
    expect(goalRow.pB).toBe(0);
  });

  it('ranks leaf 17 first in the sensitivity panel', async () => {
    await store.loadSensitivity(1, 'exact');
    expect(topLeaf(store.state.sensitivity)).toBe(17);
    expect(sensitivityExact.entries[0]!.p_given_0).toBe(0);
  });
});

describe('scene construction', () => {
  it('colors endpoints with the extreme buckets', async () => {
    await store.toggleEvidence(17, 'n');
    const scene = buildScene(graphDetail, store.state);
    const goal = scene.nodes.find((n) => n.id === 1)!; // posterior 0
    const attacker = scene.nodes.find((n) => n.id === 0)!; // posterior 1
    expect(goal.fill).not.toBe(attacker.fill);
    expect(goal.fill).toBe('#313695');
    expect(attacker.fill).toBe('#a50026');
  });

  it('shows every posterior with its standard error text', async () => {
    await store.runInference();
    const scene = buildScene(graphDetail, store.state);
    for (const node of scene.nodes) {
      expect(node.pText).toMatch(/^\d\.\d{4}$/);
      expect(node.stderrText).toMatch(/^±\d\.\d{4}$/);
    }
  });

  it('emits one svg shape per node and outlines the goal', async () => {
    await store.runInference();
    const svg = sceneToSvg(buildScene(graphDetail, store.state));
    expect(svg.match(/<rect /g)!.length).toBe(11); // leaves
    expect(svg.match(/<ellipse /g)!.length).toBe(8); // AND nodes
    expect(svg.match(/<polygon /g)!.length).toBe(6); // OR nodes
    expect(svg).toContain('stroke-width="3"');
  });
});
