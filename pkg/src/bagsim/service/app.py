"""HTTP API over the inference engine.

Graphs are uploaded once and never change; sessions own the mutable
evidence state.  Inference runs synchronously up to a per-request budget
and falls back to a 202 + poll token for long runs.  A second inference
on a session that is already running is rejected with 409.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import (
    BagsimError,
    CycleError,
    ImpossibleEvidence,
    MalformedInput,
    NoAcceptedSamples,
    TooManyLeaves,
    TooManyParents,
    UnknownNode,
    UnknownNodeKind,
    ValidationError,
    ZeroNormalization,
    ZeroTotalWeight,
)
from ..evidence import EvidenceSet
from ..graph import parse_canonical, parse_mulval_csv
from ..oracle import exact_conditional
from ..samplers import StopCriterion, run_inference
from ..sensitivity import report_to_dict, sensitivity_report
from . import schemas
from .store import GraphStore, SessionStore, apply_evidence_patch

class NotFound(BagsimError):
    """Requested resource does not exist."""


_STATUS_BY_ERROR = [
    ((NotFound,), 404),
    ((ValidationError, MalformedInput, UnknownNodeKind, UnknownNode), 422),
    ((NoAcceptedSamples, ZeroTotalWeight, ZeroNormalization, ImpossibleEvidence), 409),
    ((TooManyLeaves, TooManyParents), 422),
    ((CycleError,), 422),
]


def _error_body(exc: BagsimError) -> dict:
    violations = []
    if isinstance(exc, ValidationError):
        violations = [str(v) for v in exc.violations]
    return {"error": type(exc).__name__, "detail": str(exc), "violations": violations}


def create_app(graph_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="bagsim", version="0.1.0")
    graphs = GraphStore()
    sessions = SessionStore()
    app.state.graphs = graphs
    app.state.sessions = sessions

    if graph_dir:
        for path in sorted(Path(graph_dir).glob("*.json")):
            graphs.add(parse_canonical(path.read_text(encoding="utf-8")), name=path.stem)

    @app.exception_handler(BagsimError)
    async def _bagsim_error(request: Request, exc: BagsimError):
        status = 500
        for classes, code in _STATUS_BY_ERROR:
            if isinstance(exc, classes):
                status = code
                break
        return JSONResponse(status_code=status, content=_error_body(exc))

    def _handle(stored) -> schemas.GraphHandle:
        return schemas.GraphHandle(
            graph_id=stored.graph_id,
            name=stored.name,
            n_nodes=len(stored.graph),
            n_edges=len(stored.graph.edges),
            goals=sorted(stored.graph.goals),
        )

    def _get_graph(graph_id: str):
        stored = graphs.get(graph_id)
        if stored is None:
            raise _http_404(f"no graph with id {graph_id!r}")
        return stored

    def _get_session(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            raise _http_404(f"no session with id {session_id!r}")
        return session

    def _session_out(session) -> schemas.SessionOut:
        return schemas.SessionOut(
            session_id=session.session_id,
            graph_id=session.graph_id,
            evidence=dict(sorted(session.evidence.items())),
            has_result=session.last_result is not None,
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/graphs", response_model=schemas.GraphHandle, status_code=201)
    def upload_graph(body: schemas.GraphUpload):
        if body.mulval is not None:
            graph = parse_mulval_csv(
                body.mulval.vertices, body.mulval.arcs, body.mulval.arc_direction
            )
        elif body.nodes is not None:
            doc = {
                "nodes": [n.model_dump() for n in body.nodes],
                "edges": [list(e) for e in body.edges],
                "goals": body.goals,
            }
            import json as _json

            graph = parse_canonical(_json.dumps(doc))
        else:
            raise MalformedInput('upload must contain "nodes" or "mulval"')
        return _handle(graphs.add(graph, name=body.name))

    @app.get("/graphs", response_model=list[schemas.GraphHandle])
    def catalog():
        return [_handle(s) for s in graphs.all()]

    @app.get("/graphs/{graph_id}", response_model=schemas.GraphDetail)
    def graph_detail(graph_id: str):
        stored = _get_graph(graph_id)
        return schemas.GraphDetail(
            graph_id=stored.graph_id,
            name=stored.name,
            n_nodes=len(stored.graph),
            n_edges=len(stored.graph.edges),
            goals=sorted(stored.graph.goals),
            nodes=[
                schemas.NodePayload(
                    id=n.id, type=n.kind.value, label=n.label, prob=n.local_prob
                )
                for n in stored.graph.nodes
            ],
            edges=[tuple(e) for e in sorted(stored.graph.edges)],
        )

    @app.get("/graphs/{graph_id}/sensitivity", response_model=schemas.SensitivityOut)
    def graph_sensitivity(
        graph_id: str,
        goal: int,
        engine: str = "exact",
        seed: int = 0,
        error: float = 0.02,
        max_samples: int = 200_000,
    ):
        stored = _get_graph(graph_id)
        if goal not in stored.graph:
            raise _http_404(f"goal node {goal} does not exist in graph {graph_id!r}")
        stop = None
        if engine != "exact":
            stop = StopCriterion(
                per_node_error=error, max_samples=max_samples, monitored=frozenset({goal})
            )
        entries = sensitivity_report(stored.graph, goal, engine=engine, stop=stop, seed=seed)
        return schemas.SensitivityOut(
            goal=goal,
            engine=engine,
            entries=[schemas.SensitivityRow(**row) for row in report_to_dict(entries)],
        )

    @app.post("/sessions", response_model=schemas.SessionOut, status_code=201)
    def create_session(body: schemas.SessionCreate):
        _get_graph(body.graph_id)
        session = sessions.create(body.graph_id)
        return _session_out(session)

    @app.get("/sessions/{session_id}", response_model=schemas.SessionOut)
    def get_session(session_id: str):
        return _session_out(_get_session(session_id))

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        _get_session(session_id)
        sessions.delete(session_id)

    @app.patch("/sessions/{session_id}/evidence", response_model=schemas.SessionOut)
    def patch_evidence(session_id: str, body: schemas.EvidencePatch):
        session = _get_session(session_id)
        stored = _get_graph(session.graph_id)
        with session.lock:
            apply_evidence_patch(session, stored.graph, body.set, body.clear, body.clear_all)
        return _session_out(session)

    @app.post("/sessions/{session_id}/infer")
    def infer(session_id: str, body: schemas.InferRequest):
        session = _get_session(session_id)
        stored = _get_graph(session.graph_id)
        with session.lock:
            if session.running_token is not None:
                return JSONResponse(
                    status_code=409,
                    content={
                        "error": "InferenceRunning",
                        "detail": "an inference is already running on this session",
                        "violations": [],
                    },
                )
            evidence = session.evidence_set(stored.graph)
            token = uuid.uuid4().hex
            session.running_token = token
            session.pending[token] = None

        holder: dict[str, object] = {}
        done = threading.Event()

        def work():
            try:
                holder["result"] = _run(stored.graph, evidence, body)
            except BaseException as exc:  # delivered to the poller
                holder["error"] = exc
            finally:
                with session.lock:
                    session.running_token = None
                    if "result" in holder:
                        session.pending[token] = holder["result"]
                        session.last_result = holder["result"]
                    else:
                        session.pending.pop(token, None)
                done.set()

        threading.Thread(target=work, daemon=True).start()
        if not done.wait(timeout=max(body.budget_s, 0.0)):
            return JSONResponse(
                status_code=202,
                content=schemas.PendingOut(
                    status="running",
                    poll_token=token,
                    poll_url=f"/sessions/{session_id}/result/{token}",
                ).model_dump(),
            )
        if "error" in holder:
            raise holder["error"]
        return holder["result"]

    @app.get("/sessions/{session_id}/result/{token}")
    def poll_result(session_id: str, token: str):
        session = _get_session(session_id)
        with session.lock:
            if token not in session.pending:
                raise _http_404(f"no pending result with token {token!r}")
            result = session.pending[token]
            if result is None:
                return JSONResponse(
                    status_code=202,
                    content={"status": "running", "poll_token": token,
                             "poll_url": f"/sessions/{session_id}/result/{token}"},
                )
        return result

    @app.get("/sessions/{session_id}/posteriors")
    def last_posteriors(session_id: str):
        session = _get_session(session_id)
        if session.last_result is None:
            raise _http_404("session has no completed inference yet")
        return session.last_result

    @app.get("/sessions/{session_id}/trace")
    def last_trace(session_id: str):
        session = _get_session(session_id)
        if session.last_result is None:
            raise _http_404("session has no completed inference yet")
        return {"trace": session.last_result.get("trace", [])}

    return app


def _run(graph, evidence: EvidenceSet, body: schemas.InferRequest) -> dict:
    if body.technique == "exact":
        posteriors = exact_conditional(graph, evidence)
        return {
            "technique": "exact",
            "converged": True,
            "n_raw": 0,
            "acceptance_rate": None,
            "weight_stats": None,
            "posteriors": [
                {"id": p.node_id, "p": p.probability, "stderr": 0.0, "n_eff": None}
                for p in sorted(posteriors.values(), key=lambda p: p.node_id)
            ],
            "trace": [],
        }
    result = run_inference(
        graph,
        evidence,
        body.technique,
        StopCriterion(per_node_error=body.error, max_samples=body.max_samples),
        seed=body.seed if body.seed is not None else 0,
        batch_size=body.batch_size,
    )
    return result.to_dict(include_timing=body.include_timing)


def _http_404(detail: str) -> NotFound:
    return NotFound(detail)
