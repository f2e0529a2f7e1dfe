// Session state for the what-if explorer.
//
// Evidence toggles always round-trip through the service: the toggle is
// PATCHed first, inference runs under the patched evidence, and the
// posteriors remember which evidence they were computed under so a view
// whose toggles moved on is flagged stale instead of silently wrong.

import { ApiError, ServiceApi } from './api.js';
import type {
  EvidenceValue,
  GraphDetail,
  InferenceOut,
  SensitivityOut,
  Technique,
} from './types.js';

export interface Snapshot {
  name: string;
  evidence: Record<number, boolean>;
  result: InferenceOut;
}

export interface ViewState {
  graph: GraphDetail | null;
  sessionId: string | null;
  evidence: Record<number, boolean>;
  technique: Technique;
  errorTarget: number;
  seed: number;
  result: InferenceOut | null;
  resultEvidence: Record<number, boolean> | null;
  running: boolean;
  lastError: string | null;
  pinned: Snapshot | null;
  sensitivity: SensitivityOut | null;
}

export function initialState(): ViewState {
  return {
    graph: null,
    sessionId: null,
    evidence: {},
    technique: 'lw', // best general-purpose default for belief updating
    errorTarget: 0.02,
    seed: 1,
    result: null,
    resultEvidence: null,
    running: false,
    lastError: null,
    pinned: null,
    sensitivity: null,
  };
}

export function evidenceEqual(
  a: Record<number, boolean> | null,
  b: Record<number, boolean> | null,
): boolean {
  if (a === null || b === null) return a === b;
  const ka = Object.keys(a).sort();
  const kb = Object.keys(b).sort();
  return ka.length === kb.length && ka.every((k, i) => k === kb[i] && a[Number(k)] === b[Number(k)]);
}

export function isStale(state: ViewState): boolean {
  return state.result !== null && !evidenceEqual(state.evidence, state.resultEvidence);
}

export class AppStore {
  state: ViewState = initialState();
  private listeners: (() => void)[] = [];

  constructor(private api: ServiceApi) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async selectGraph(graphId: string): Promise<void> {
    const graph = await this.api.graphDetail(graphId);
    const session = await this.api.createSession(graphId);
    this.state = {
      ...initialState(),
      graph,
      sessionId: session.session_id,
      seed: this.state.seed,
      technique: this.state.technique,
    };
    this.emit();
  }

  evidenceValue(nodeId: number): EvidenceValue {
    const current = this.state.evidence[nodeId];
    if (current === undefined) return 'unset';
    return current ? 'y' : 'n';
  }

  async toggleEvidence(nodeId: number, value: EvidenceValue): Promise<void> {
    if (!this.state.sessionId) throw new Error('no active session');
    const patch =
      value === 'unset'
        ? { clear: [nodeId] }
        : { set: { [nodeId]: value === 'y' } };
    this.state.lastError = null;
    try {
      const session = await this.api.patchEvidence(this.state.sessionId, patch);
      const evidence: Record<number, boolean> = {};
      for (const [key, v] of Object.entries(session.evidence)) evidence[Number(key)] = v;
      this.state = { ...this.state, evidence };
      this.emit();
      await this.runInference();
    } catch (error) {
      this.fail(error);
    }
  }

  async runInference(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) throw new Error('no active session');
    const requested = { ...this.state.evidence };
    this.state = { ...this.state, running: true, lastError: null };
    this.emit();
    try {
      const result = await this.api.infer(sessionId, {
        technique: this.state.technique,
        error: this.state.errorTarget,
        seed: this.state.seed,
      });
      this.state = {
        ...this.state,
        running: false,
        result,
        resultEvidence: requested,
      };
      this.emit();
    } catch (error) {
      this.state = { ...this.state, running: false };
      this.fail(error);
    }
  }

  async loadSensitivity(goal: number, engine: string = 'exact'): Promise<void> {
    const graph = this.state.graph;
    if (!graph) throw new Error('no graph selected');
    try {
      const sensitivity = await this.api.sensitivity(
        graph.graph_id,
        goal,
        engine,
        this.state.seed,
      );
      this.state = { ...this.state, sensitivity };
      this.emit();
    } catch (error) {
      this.fail(error);
    }
  }

  pinSnapshot(name: string): Snapshot {
    if (!this.state.result || !this.state.resultEvidence || isStale(this.state)) {
      throw new Error('cannot pin a stale or missing result');
    }
    const snapshot: Snapshot = {
      name,
      evidence: { ...this.state.resultEvidence },
      result: this.state.result,
    };
    this.state = { ...this.state, pinned: snapshot };
    this.emit();
    return snapshot;
  }

  currentSnapshot(name: string): Snapshot {
    if (!this.state.result || !this.state.resultEvidence) {
      throw new Error('no result to snapshot');
    }
    return {
      name,
      evidence: { ...this.state.resultEvidence },
      result: this.state.result,
    };
  }

  private fail(error: unknown): void {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : error instanceof Error
          ? error.message
          : String(error);
    this.state = { ...this.state, lastError: message };
    this.emit();
  }
}
