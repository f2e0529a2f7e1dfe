"""Stochastic inference engines: forward sampling, rejection (PLS),
likelihood weighting (LW) and backward simulation (BS).

All three engines share one vectorised forward pass and one batch layout:
a batch draws its uniforms in a single fixed pattern, so PLS, LW and BS
produce bit-identical samples whenever no evidence is present.  Batches
are seeded independently through a counter-based Philox generator keyed
by (seed, batch index), which makes results reproducible regardless of
how batches would be scheduled.

Graphs do not need to be decomposed first: a node with local probability
q is sampled as ``gate(parents) and (u < q)``, which reduces to the pure
gate when q == 1.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidSpec,
    NoAcceptedSamples,
    TooManyParents,
    UnknownNode,
    ZeroNormalization,
    ZeroTotalWeight,
)
from .evidence import EvidenceSet
from .graph import AttackGraph, NodeKind, topological_order

TECHNIQUES = ("pls", "lw", "bs")
MAX_BACKWARD_PARENTS = 20


@dataclass(frozen=True)
class Sample:
    """One full boolean assignment plus its importance weight."""

    assignment: dict[int, bool]
    weight: float = 1.0


@dataclass(frozen=True)
class PosteriorEstimate:
    node_id: int
    p_hat: float
    stderr: float
    n_effective: float
    n_raw: int


@dataclass(frozen=True)
class StopCriterion:
    """Convergence rule: stop when every monitored node's standard error
    drops to ``per_node_error``, or at ``max_samples`` raw samples.

    The error target only counts as met once the effective sample count
    reaches 0.25/per_node_error**2, the count at which a maximum-variance
    (p = 0.5) node first satisfies the target.  Without that floor a
    handful of agreeing samples would report zero standard error on every
    node and stop a run that has learned nothing.
    """

    per_node_error: float = 0.02
    max_samples: int = 100_000
    monitored: frozenset[int] | None = None

    def __post_init__(self):
        if not self.per_node_error > 0:
            raise DomainError(f"per_node_error must be > 0, got {self.per_node_error}")
        if self.max_samples < 1:
            raise DomainError(f"max_samples must be >= 1, got {self.max_samples}")

    @property
    def min_effective(self) -> float:
        return 0.25 / (self.per_node_error * self.per_node_error)


@dataclass
class InferenceResult:
    """Outcome of one inference run, serialisable to the wire format."""

    technique: str
    converged: bool
    timed_out: bool
    n_raw: int
    wall_ms: float
    posteriors: dict[int, PosteriorEstimate]
    acceptance_rate: float | None
    weight_stats: dict[str, float] | None
    trace: list[dict]
    evidence: EvidenceSet

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "technique": self.technique,
            "converged": self.converged,
            "n_raw": self.n_raw,
            "acceptance_rate": self.acceptance_rate,
            "weight_stats": self.weight_stats,
            "posteriors": [
                {
                    "id": est.node_id,
                    "p": est.p_hat,
                    "stderr": est.stderr,
                    "n_eff": est.n_effective,
                }
                for est in sorted(self.posteriors.values(), key=lambda e: e.node_id)
            ],
            "trace": self.trace,
        }
        if include_timing:
            doc["wall_ms"] = self.wall_ms
        return doc


def stderr_of(p_hat: float, n_effective: float) -> float:
    """Standard error of a proportion estimate: sqrt(p(1-p)/n)."""
    if not 0.0 <= p_hat <= 1.0:
        raise DomainError(f"p_hat must lie in [0, 1], got {p_hat}")
    if not n_effective > 0:
        raise DomainError(f"n_effective must be > 0, got {n_effective}")
    return math.sqrt(p_hat * (1.0 - p_hat) / n_effective)


def effective_sample_size(weights: Sequence[float] | np.ndarray) -> float:
    """Equal-weight sample count matching a weighted estimator's variance:
    (sum w)^2 / sum w^2."""
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        return 0.0
    return float(total * total / np.square(w).sum())


def batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one batch."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(batch_index),))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# compiled graph


class _Compiled:
    """Graph flattened into topologically ordered column arrays."""

    def __init__(self, graph: AttackGraph):
        self.graph = graph
        self.order = topological_order(graph)
        self.n = len(self.order)
        self.col = {node_id: t for t, node_id in enumerate(self.order)}
        self.kinds = [graph.node(i).kind for i in self.order]
        self.probs = np.array([graph.node(i).local_prob for i in self.order])
        self.parent_cols = [
            tuple(self.col[p] for p in graph.parents(i)) for i in self.order
        ]
        self.leaf_cols = np.array(
            [t for t, k in enumerate(self.kinds) if k is NodeKind.LEAF], dtype=np.intp
        )
        self.internal_cols = tuple(
            t for t, k in enumerate(self.kinds) if k is not NodeKind.LEAF
        )


def _gate(compiled: _Compiled, values: np.ndarray, t: int) -> np.ndarray | bool:
    kind = compiled.kinds[t]
    if kind is NodeKind.LEAF:
        return True
    pc = compiled.parent_cols[t]
    out = values[:, pc[0]]
    if kind is NodeKind.AND:
        for c in pc[1:]:
            out = out & values[:, c]
    else:
        for c in pc[1:]:
            out = out | values[:, c]
    return out


def _forward_fill(
    compiled: _Compiled,
    values: np.ndarray,
    uniforms: np.ndarray,
    columns: Iterable[int] | None = None,
) -> None:
    """Sample the given columns (topological positions, ascending) in place."""
    if columns is None:
        # leaves share no dependencies; fill them in one vector op
        lc = compiled.leaf_cols
        values[:, lc] = uniforms[:, lc] < compiled.probs[lc]
        cols: Iterable[int] = compiled.internal_cols
    else:
        cols = columns
    for t in cols:
        gate = _gate(compiled, values, t)
        q = compiled.probs[t]
        if compiled.kinds[t] is NodeKind.LEAF:
            values[:, t] = uniforms[:, t] < q
        elif q >= 1.0:  # deterministic gate; u < 1 always holds
            values[:, t] = gate
        else:
            values[:, t] = gate & (uniforms[:, t] < q)


def _prob_of_value(
    compiled: _Compiled, values: np.ndarray, t: int, state: np.ndarray | bool
) -> np.ndarray:
    """Vectorised P(node at column t takes ``state`` | realised parents)."""
    q = compiled.probs[t]
    if compiled.kinds[t] is NodeKind.LEAF:
        return np.where(state, q, 1.0 - q)
    p1 = q * _gate(compiled, values, t)
    return np.where(state, p1, 1.0 - p1)


def sample_forward(graph: AttackGraph, rng: np.random.Generator | int) -> Sample:
    """Draw one unweighted forward sample of the whole graph."""
    gen = rng if isinstance(rng, np.random.Generator) else batch_rng(int(rng), 0)
    compiled = _Compiled(graph)
    values = np.zeros((1, compiled.n), dtype=bool)
    uniforms = gen.random((1, compiled.n))
    _forward_fill(compiled, values, uniforms)
    assignment = {node_id: bool(values[0, compiled.col[node_id]]) for node_id in graph.ids}
    return Sample(assignment, 1.0)


# ---------------------------------------------------------------------------
# per-batch sample generation


def _pls_batch(
    compiled: _Compiled, ev_cols: list[tuple[int, bool]], rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Forward samples plus acceptance mask against the evidence."""
    uniforms = rng.random((size, compiled.n))
    values = np.zeros((size, compiled.n), dtype=bool)
    _forward_fill(compiled, values, uniforms)
    accept = np.ones(size, dtype=bool)
    for t, state in ev_cols:
        accept &= values[:, t] == state
    return values, accept


def _lw_batch(
    compiled: _Compiled, ev_cols: dict[int, bool], rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Samples with evidence clamped; weight is the evidence likelihood
    under the realised parent configurations."""
    uniforms = rng.random((size, compiled.n))
    values = np.zeros((size, compiled.n), dtype=bool)
    weights = np.ones(size)
    for t in range(compiled.n):
        if t in ev_cols:
            state = ev_cols[t]
            weights *= _prob_of_value(compiled, values, t, state)
            values[:, t] = state
        else:
            values[:, t] = _gate(compiled, values, t) & (
                uniforms[:, t] < compiled.probs[t]
            )
    return values, weights


@dataclass(frozen=True)
class BackwardStep:
    """One backward-sampling site: the node's value is already set and a
    joint configuration of its uninstantiated parents gets sampled from
    the normalised likelihood of that value.

    For this CPT family the likelihood takes at most two distinct values
    across the 2^m parent configurations (the all-ones or all-zeros
    configuration is special, the rest are interchangeable), so the
    normalisation constant and the inverse-CDF sample are closed forms of
    the configuration count instead of an enumeration.
    """

    node_id: int
    col: int
    pa_u: tuple[int, ...]  # columns, ascending
    pa_star: tuple[int, ...]  # columns, ascending
    n_configs: int  # 2^m over the uninstantiated parents


@dataclass(frozen=True)
class BackwardPlan:
    """Sample-independent schedule for backward simulation."""

    steps: tuple[BackwardStep, ...]  # reverse topological order
    direct_cols: tuple[int, ...]  # instantiated nodes evaluated in place
    forward_cols: tuple[int, ...]  # never-instantiated nodes, topological
    ev_cols: tuple[tuple[int, bool], ...]


def plan_backward(graph_or_compiled, evidence: EvidenceSet) -> BackwardPlan:
    """Precompute which nodes get backward-sampled, directly evaluated, or
    forward-sampled.  The schedule depends only on graph structure and the
    evidence keys, never on sampled values."""
    compiled = (
        graph_or_compiled
        if isinstance(graph_or_compiled, _Compiled)
        else _Compiled(graph_or_compiled)
    )
    ev_cols = {compiled.col[i]: bool(v) for i, v in evidence.items()}
    instantiated = set(ev_cols)
    steps: list[BackwardStep] = []
    direct: list[int] = []
    for t in reversed(range(compiled.n)):
        if t not in instantiated:
            continue
        pa = compiled.parent_cols[t]
        pa_u = tuple(int(c) for c in pa if c not in instantiated)
        pa_star = tuple(int(c) for c in pa if c in instantiated)
        if not pa_u:
            direct.append(t)
            continue
        if len(pa_u) > MAX_BACKWARD_PARENTS:
            raise TooManyParents(
                f"node {compiled.order[t]} has {len(pa_u)} uninstantiated parents; "
                f"the configuration cap is {MAX_BACKWARD_PARENTS}"
            )
        step = BackwardStep(
            node_id=compiled.order[t],
            col=t,
            pa_u=pa_u,
            pa_star=pa_star,
            n_configs=1 << len(pa_u),
        )
        _check_static_norm(compiled, step, ev_cols)
        steps.append(step)
        instantiated.update(pa_u)

    forward = tuple(t for t in range(compiled.n) if t not in instantiated)
    return BackwardPlan(
        steps=tuple(steps),
        direct_cols=tuple(sorted(direct)),
        forward_cols=forward,
        ev_cols=tuple(sorted(ev_cols.items())),
    )


def _check_static_norm(
    compiled: _Compiled, step: BackwardStep, ev_cols: dict[int, bool]
) -> None:
    """Evidence nodes whose instantiated parents are all evidence have a
    sample-independent normalisation; a zero there can never recover."""
    if step.col not in ev_cols or any(c not in ev_cols for c in step.pa_star):
        return
    state = np.array([ev_cols[step.col]])
    q = compiled.probs[step.col]
    kind = compiled.kinds[step.col]
    star_all1 = np.array([all(ev_cols[c] for c in step.pa_star)])
    star_any1 = np.array([any(ev_cols[c] for c in step.pa_star)])
    norm, _ = _step_norm_and_pick(
        kind, q, step.n_configs, state, star_all1, star_any1, np.zeros(1)
    )
    if norm[0] == 0.0:
        raise ZeroNormalization(
            f"evidence node {step.node_id}={'y' if state[0] else 'n'} has zero "
            "normalisation for every parent configuration"
        )


def _step_norm_and_pick(
    kind: NodeKind,
    q: float,
    n_configs: int,
    state: np.ndarray,
    star_all1: np.ndarray,
    star_any1: np.ndarray,
    r: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalisation constant and sampled configuration index per sample.

    Configurations are indexed by the bit pattern of the uninstantiated
    parents, so index 0 is all-zeros and n_configs - 1 is all-ones.  An
    AND likelihood is flat except at the all-ones index, an OR likelihood
    flat except at all-zeros, which is all the structure needed to invert
    the CDF directly.
    """
    last = n_configs - 1
    if kind is NodeKind.AND:
        chance = q * star_all1  # bool promotes to float
        norm = np.where(state, chance, n_configs - chance)
        t = r * norm
        pick = np.where(state, last, np.minimum(np.floor(t), last).astype(np.intp))
    else:
        w0_true = q * star_any1  # all-zeros config, node observed true
        norm_true = w0_true + (n_configs - 1) * q
        w0_false = 1.0 - w0_true
        norm_false = w0_false + (n_configs - 1) * (1.0 - q)
        norm = np.where(state, norm_true, norm_false)
        # q factors out of the true-branch pick; guard the q == 1 false
        # branch where every non-zero-index weight vanishes
        u_true = r * (star_any1 + (n_configs - 1))
        pick_true = np.where(u_true < star_any1, 0, 1 + np.floor(u_true - star_any1))
        t_false = r * norm_false
        tail = max(1.0 - q, 1e-300)
        pick_false = np.where(t_false < w0_false, 0, 1 + np.floor((t_false - w0_false) / tail))
        pick = np.where(state, pick_true, pick_false)
        pick = np.minimum(pick, last).astype(np.intp)
    return norm, pick


def _bs_batch(
    compiled: _Compiled,
    plan: BackwardPlan,
    rng: np.random.Generator,
    size: int,
    norms_out: dict[int, np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Backward-then-forward samples with importance weights.

    Weight = product of the normalisation constants of all backward steps
    times the likelihood of every instantiated node that was not sampled
    from (evidence leaves, nodes whose parents were all settled already).
    A zero normalisation for a particular sample yields weight zero.
    """
    step_uniforms = rng.random((len(plan.steps), size))
    uniforms = rng.random((size, compiled.n))
    values = np.zeros((size, compiled.n), dtype=bool)
    for t, state in plan.ev_cols:
        values[:, t] = state
    weights = np.ones(size)

    true_row = np.ones(size, dtype=bool)
    false_row = np.zeros(size, dtype=bool)
    for step, r in zip(plan.steps, step_uniforms):
        q = compiled.probs[step.col]
        kind = compiled.kinds[step.col]
        state = values[:, step.col]
        if step.pa_star:
            star_all1 = values[:, step.pa_star[0]]
            star_any1 = star_all1
            for c in step.pa_star[1:]:
                star_all1 = star_all1 & values[:, c]
                star_any1 = star_any1 | values[:, c]
        else:
            star_all1 = true_row
            star_any1 = false_row
        norm, pick = _step_norm_and_pick(
            kind, q, step.n_configs, state, star_all1, star_any1, r
        )
        if norms_out is not None:
            norms_out[step.node_id] = norm.copy()
        weights *= norm
        for bit, col in enumerate(step.pa_u):
            values[:, col] = (pick >> bit) & 1 == 1

    for t in plan.direct_cols:
        weights *= _prob_of_value(compiled, values, t, values[:, t])

    _forward_fill(compiled, values, uniforms, plan.forward_cols)
    return values, weights


# ---------------------------------------------------------------------------
# inference facade


def run_inference(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool] | None = None,
    technique: str = "lw",
    stop: StopCriterion | None = None,
    seed: int = 0,
    batch_size: int = 1000,
    trace_nodes: Iterable[int] | None = None,
    time_budget_s: float | None = None,
) -> InferenceResult:
    """Run one technique in batches until the stop criterion is met.

    Returns estimates for every node, a convergence trace for the traced
    nodes (the graph's goals by default), and the per-technique extras:
    acceptance rate for PLS, weight statistics for LW/BS.
    """
    tech = str(technique).lower()
    if tech not in TECHNIQUES:
        raise InvalidSpec(f"technique must be one of {TECHNIQUES}, got {technique!r}")
    if batch_size < 1:
        raise DomainError(f"batch_size must be >= 1, got {batch_size}")
    stop = stop or StopCriterion()
    ev = evidence if isinstance(evidence, EvidenceSet) else EvidenceSet.for_graph(graph, evidence)

    compiled = _Compiled(graph)
    ev_map = {compiled.col[i]: bool(v) for i, v in ev.items()}
    if stop.monitored is None:
        monitored_ids = [i for i in graph.ids if i not in ev]
    else:
        unknown = [i for i in stop.monitored if i not in graph]
        if unknown:
            raise UnknownNode(f"monitored set references unknown node ids {sorted(unknown)}")
        monitored_ids = sorted(stop.monitored)
    monitored_cols = np.array([compiled.col[i] for i in monitored_ids], dtype=np.intp)

    if trace_nodes is None:
        traced_ids = sorted(graph.goals)
    else:
        traced_ids = sorted(set(int(i) for i in trace_nodes))
        unknown = [i for i in traced_ids if i not in graph]
        if unknown:
            raise UnknownNode(f"trace set references unknown node ids {sorted(unknown)}")

    plan = plan_backward(compiled, ev) if tech == "bs" and len(ev) else None

    sum_wx = np.zeros(compiled.n)
    sum_w = 0.0
    sum_w2 = 0.0
    accepted = 0
    n_raw = 0
    batch_index = 0
    converged = False
    timed_out = False
    trace: list[dict] = []
    started = time.perf_counter()

    while n_raw < stop.max_samples:
        size = min(batch_size, stop.max_samples - n_raw)
        rng = batch_rng(seed, batch_index)
        if tech == "pls":
            values, accept = _pls_batch(compiled, sorted(ev_map.items()), rng, size)
            sum_wx += values[accept].sum(axis=0)
            accepted += int(accept.sum())
            sum_w = float(accepted)
            sum_w2 = float(accepted)
        else:
            if tech == "lw" or plan is None:
                values, weights = _lw_batch(compiled, ev_map, rng, size)
            else:
                values, weights = _bs_batch(compiled, plan, rng, size)
            sum_wx += weights @ values
            sum_w += float(weights.sum())
            sum_w2 += float(np.square(weights).sum())
        n_raw += size
        batch_index += 1

        n_eff = (sum_w * sum_w / sum_w2) if sum_w2 > 0 else 0.0
        p_all = sum_wx / sum_w if sum_w > 0 else np.zeros(compiled.n)
        np.clip(p_all, 0.0, 1.0, out=p_all)
        se_all = (
            np.sqrt(p_all * (1.0 - p_all) / n_eff)
            if n_eff > 0
            else np.full(compiled.n, np.inf)
        )
        if traced_ids:
            trace.append(
                {
                    "n_raw": n_raw,
                    "nodes": [
                        {
                            "id": i,
                            "p": float(p_all[compiled.col[i]]),
                            "stderr": float(se_all[compiled.col[i]]),
                        }
                        for i in traced_ids
                    ],
                }
            )
        if n_eff >= stop.min_effective and (
            monitored_cols.size == 0
            or bool((se_all[monitored_cols] <= stop.per_node_error).all())
        ):
            converged = True
            break
        if time_budget_s is not None and time.perf_counter() - started > time_budget_s:
            timed_out = True
            break

    wall_ms = (time.perf_counter() - started) * 1000.0
    if tech == "pls" and accepted == 0:
        raise NoAcceptedSamples(
            f"no samples consistent with evidence {ev.to_string()!r} "
            f"after {n_raw} draws"
        )
    if tech != "pls" and sum_w <= 0.0:
        raise ZeroTotalWeight(
            f"all weights zero for evidence {ev.to_string()!r} after {n_raw} draws"
        )

    n_eff = sum_w * sum_w / sum_w2
    posteriors = {}
    for node_id in graph.ids:
        p = float(min(max(sum_wx[compiled.col[node_id]] / sum_w, 0.0), 1.0))
        posteriors[node_id] = PosteriorEstimate(
            node_id=node_id,
            p_hat=p,
            stderr=stderr_of(p, n_eff),
            n_effective=n_eff,
            n_raw=n_raw,
        )

    if tech == "pls":
        acceptance_rate: float | None = accepted / n_raw
        weight_stats = None
    else:
        acceptance_rate = None
        weight_stats = {
            "mean_weight": sum_w / n_raw,
            "ess": n_eff,
            "ess_fraction": n_eff / n_raw,
        }

    return InferenceResult(
        technique=tech,
        converged=converged,
        timed_out=timed_out,
        n_raw=n_raw,
        wall_ms=wall_ms,
        posteriors=posteriors,
        acceptance_rate=acceptance_rate,
        weight_stats=weight_stats,
        trace=trace,
        evidence=ev,
    )


def pls_infer(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool] | None,
    stop: StopCriterion | None = None,
    seed: int = 0,
    batch_size: int = 1000,
) -> InferenceResult:
    """Rejection sampling: forward-simulate, keep evidence-consistent runs."""
    return run_inference(graph, evidence, "pls", stop, seed, batch_size)


def lw_infer(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool] | None,
    stop: StopCriterion | None = None,
    seed: int = 0,
    batch_size: int = 1000,
) -> InferenceResult:
    """Likelihood weighting: clamp evidence, weight by its likelihood."""
    return run_inference(graph, evidence, "lw", stop, seed, batch_size)


def bs_infer(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool] | None,
    stop: StopCriterion | None = None,
    seed: int = 0,
    batch_size: int = 1000,
) -> InferenceResult:
    """Backward simulation: start at the evidence, sample parents from the
    normalised likelihood, forward-sample the rest."""
    return run_inference(graph, evidence, "bs", stop, seed, batch_size)


# ---------------------------------------------------------------------------
# debug/test entry points


def lw_sample_batch(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool],
    seed: int = 0,
    size: int = 1000,
    batch_index: int = 0,
) -> tuple[list[Sample], np.ndarray]:
    """One LW batch with per-sample assignments and weights exposed."""
    ev = evidence if isinstance(evidence, EvidenceSet) else EvidenceSet.for_graph(graph, evidence)
    compiled = _Compiled(graph)
    ev_map = {compiled.col[i]: bool(v) for i, v in ev.items()}
    values, weights = _lw_batch(compiled, ev_map, batch_rng(seed, batch_index), size)
    samples = [
        Sample(
            {node_id: bool(values[row, compiled.col[node_id]]) for node_id in graph.ids},
            float(weights[row]),
        )
        for row in range(size)
    ]
    return samples, weights


def bs_sample_batch(
    graph: AttackGraph,
    evidence: EvidenceSet | Mapping[int, bool],
    seed: int = 0,
    size: int = 1000,
    batch_index: int = 0,
) -> tuple[np.ndarray, np.ndarray, dict[int, np.ndarray]]:
    """One BS batch exposing values, weights and every per-sample
    normalisation constant keyed by backward-step node id."""
    ev = evidence if isinstance(evidence, EvidenceSet) else EvidenceSet.for_graph(graph, evidence)
    compiled = _Compiled(graph)
    plan = plan_backward(compiled, ev)
    norms: dict[int, np.ndarray] = {}
    values, weights = _bs_batch(compiled, plan, batch_rng(seed, batch_index), size, norms)
    return values, weights, norms
