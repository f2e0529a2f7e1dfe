"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class MulvalPayload(BaseModel):
    vertices: str
    arcs: str
    arc_direction: Literal["dst_src", "src_dst"] = "dst_src"


class NodePayload(BaseModel):
    id: int
    type: Literal["LEAF", "AND", "OR"]
    label: str = ""
    prob: float | None = None


class GraphUpload(BaseModel):
    """Either inline canonical fields or a MulVAL CSV pair."""

    name: str | None = None
    nodes: list[NodePayload] | None = None
    edges: list[tuple[int, int]] = Field(default_factory=list)
    goals: list[int] = Field(default_factory=list)
    mulval: MulvalPayload | None = None


class GraphHandle(BaseModel):
    graph_id: str
    name: str
    n_nodes: int
    n_edges: int
    goals: list[int]


class GraphDetail(GraphHandle):
    nodes: list[NodePayload]
    edges: list[tuple[int, int]]


class SessionCreate(BaseModel):
    graph_id: str


class EvidencePatch(BaseModel):
    set: dict[int, bool] = Field(default_factory=dict)
    clear: list[int] = Field(default_factory=list)
    clear_all: bool = False


class SessionOut(BaseModel):
    session_id: str
    graph_id: str
    evidence: dict[int, bool]
    has_result: bool


class InferRequest(BaseModel):
    technique: Literal["pls", "lw", "bs", "exact"] = "lw"
    error: float = 0.02
    max_samples: int = 100_000
    seed: int | None = None
    batch_size: int = 1000
    include_timing: bool = False
    budget_s: float = 10.0


class PosteriorOut(BaseModel):
    id: int
    p: float
    stderr: float
    n_eff: float | None


class TracePoint(BaseModel):
    n_raw: int
    nodes: list[dict]


class InferenceOut(BaseModel):
    technique: str
    converged: bool
    n_raw: int
    acceptance_rate: float | None = None
    weight_stats: dict[str, float] | None = None
    posteriors: list[PosteriorOut]
    trace: list[TracePoint]
    wall_ms: float | None = None


class PendingOut(BaseModel):
    status: Literal["running"]
    poll_token: str
    poll_url: str


class SensitivityRow(BaseModel):
    leaf: int
    goal: int
    sensitivity: float
    p_given_1: float
    p_given_0: float
    stderr: float


class SensitivityOut(BaseModel):
    goal: int
    engine: str
    entries: list[SensitivityRow]


class ErrorBody(BaseModel):
    error: str
    detail: str
    violations: list[str] = Field(default_factory=list)
