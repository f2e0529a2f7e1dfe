// Thin typed client for the inference service.  Every number shown in the
// UI comes from one of these responses; the client does no probability
// math of its own beyond snapshot deltas.

import type {
  GraphDetail,
  GraphHandle,
  InferenceOut,
  SensitivityOut,
  SessionOut,
  Technique,
  TracePoint,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
    public violations: string[] = [],
  ) {
    super(detail);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = `HTTP ${response.status}`;
  let detail = response.statusText;
  let violations: string[] = [];
  try {
    const body = await response.json();
    code = body.error ?? code;
    detail = body.detail ?? detail;
    violations = body.violations ?? [];
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, detail, violations);
}

export class ServiceApi {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private get(url: string): Promise<Response> {
    return this.fetchImpl(this.baseUrl + url);
  }

  private send(method: string, url: string, body?: unknown): Promise<Response> {
    return this.fetchImpl(this.baseUrl + url, {
      method,
      headers: { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async catalog(): Promise<GraphHandle[]> {
    return unwrap(await this.get('/graphs'));
  }

  async graphDetail(graphId: string): Promise<GraphDetail> {
    return unwrap(await this.get(`/graphs/${graphId}`));
  }

  async createSession(graphId: string): Promise<SessionOut> {
    return unwrap(await this.send('POST', '/sessions', { graph_id: graphId }));
  }

  async patchEvidence(
    sessionId: string,
    patch: { set?: Record<number, boolean>; clear?: number[]; clear_all?: boolean },
  ): Promise<SessionOut> {
    return unwrap(await this.send('PATCH', `/sessions/${sessionId}/evidence`, patch));
  }

  async infer(
    sessionId: string,
    options: { technique: Technique; error?: number; max_samples?: number; seed?: number },
  ): Promise<InferenceOut> {
    return unwrap(await this.send('POST', `/sessions/${sessionId}/infer`, options));
  }

  async trace(sessionId: string): Promise<{ trace: TracePoint[] }> {
    return unwrap(await this.get(`/sessions/${sessionId}/trace`));
  }

  async sensitivity(
    graphId: string,
    goal: number,
    engine: string,
    seed = 0,
  ): Promise<SensitivityOut> {
    const params = new URLSearchParams({
      goal: String(goal),
      engine,
      seed: String(seed),
    });
    return unwrap(await this.get(`/graphs/${graphId}/sensitivity?${params}`));
  }
}
