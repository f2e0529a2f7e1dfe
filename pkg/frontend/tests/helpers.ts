// Shared test scaffolding: a fake service wired to recorded responses
// from the real HTTP API.

import { ServiceApi } from '../src/api.js';
import type {
  GraphDetail,
  InferenceOut,
  SensitivityOut,
  SessionOut,
} from '../src/types.js';
import graphDetailJson from './fixtures/graph_detail.json';
import inferExact17nJson from './fixtures/infer_exact_17n.json';
import inferExactEmptyJson from './fixtures/infer_exact_empty.json';
import inferLw6yJson from './fixtures/infer_lw_6y.json';
import sensitivityJson from './fixtures/sensitivity_exact.json';

export const graphDetail = graphDetailJson as unknown as GraphDetail;
export const inferExact17n = inferExact17nJson as unknown as InferenceOut;
export const inferExactEmpty = inferExactEmptyJson as unknown as InferenceOut;
export const inferLw6y = inferLw6yJson as unknown as InferenceOut;
export const sensitivityExact = sensitivityJson as unknown as SensitivityOut;

export class FakeApi extends ServiceApi {
  evidence: Record<number, boolean> = {};
  inferCalls: object[] = [];
  patchCalls: object[] = [];
  failNextInfer: { status: number; code: string; detail: string } | null = null;

  constructor() {
    super('', () => Promise.reject(new Error('network disabled in tests')));
  }

  override async graphDetail(): Promise<GraphDetail> {
    return graphDetail;
  }

  override async createSession(graphId: string): Promise<SessionOut> {
    return { session_id: 's1', graph_id: graphId, evidence: {}, has_result: false };
  }

  override async patchEvidence(
    _sessionId: string,
    patch: { set?: Record<number, boolean>; clear?: number[]; clear_all?: boolean },
  ): Promise<SessionOut> {
    this.patchCalls.push(patch);
    if (patch.clear_all) this.evidence = {};
    for (const key of patch.clear ?? []) delete this.evidence[key];
    for (const [key, value] of Object.entries(patch.set ?? {})) {
      this.evidence[Number(key)] = value;
    }
    const wire: Record<string, boolean> = {};
    for (const [key, value] of Object.entries(this.evidence)) wire[key] = value;
    return { session_id: 's1', graph_id: 'g1', evidence: wire, has_result: false };
  }

  override async infer(
    _sessionId: string,
    options: { technique: string; error?: number; seed?: number },
  ): Promise<InferenceOut> {
    this.inferCalls.push({ ...options, evidence: { ...this.evidence } });
    if (this.failNextInfer) {
      const { ApiError } = await import('../src/api.js');
      const failure = this.failNextInfer;
      this.failNextInfer = null;
      throw new ApiError(failure.status, failure.code, failure.detail);
    }
    const keys = Object.keys(this.evidence);
    if (keys.length === 0) {
      return options.technique === 'exact' ? inferExactEmpty : inferLw6y;
    }
    if (keys.length === 1 && this.evidence[17] === false) {
      return inferExact17n;
    }
    if (keys.length === 1 && this.evidence[6] === true) {
      return inferLw6y;
    }
    return inferExactEmpty;
  }

  override async sensitivity(): Promise<SensitivityOut> {
    return sensitivityExact;
  }
}
