// Wire types mirroring the service JSON exactly.

export type NodeKind = 'LEAF' | 'AND' | 'OR';
export type Technique = 'pls' | 'lw' | 'bs' | 'exact';
export type EvidenceValue = 'y' | 'n' | 'unset';

export interface GraphHandle {
  graph_id: string;
  name: string;
  n_nodes: number;
  n_edges: number;
  goals: number[];
}

export interface GraphNode {
  id: number;
  type: NodeKind;
  label: string;
  prob: number | null;
}

export interface GraphDetail extends GraphHandle {
  nodes: GraphNode[];
  edges: [number, number][];
}

export interface SessionOut {
  session_id: string;
  graph_id: string;
  evidence: Record<string, boolean>;
  has_result: boolean;
}

export interface PosteriorRow {
  id: number;
  p: number;
  stderr: number;
  n_eff: number | null;
}

export interface TracePoint {
  n_raw: number;
  nodes: { id: number; p: number; stderr: number }[];
}

export interface InferenceOut {
  technique: string;
  converged: boolean;
  n_raw: number;
  acceptance_rate: number | null;
  weight_stats: Record<string, number> | null;
  posteriors: PosteriorRow[];
  trace: TracePoint[];
}

export interface SensitivityRow {
  leaf: number;
  goal: number;
  sensitivity: number;
  p_given_1: number;
  p_given_0: number;
  stderr: number;
}

export interface SensitivityOut {
  goal: number;
  engine: string;
  entries: SensitivityRow[];
}

export interface ServiceError {
  error: string;
  detail: string;
  violations: string[];
}
