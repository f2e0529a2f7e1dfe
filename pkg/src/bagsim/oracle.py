"""Exact inference by exhaustive enumeration of leaf configurations.

This is the ground truth the samplers are tested against, so it stays
deliberately unclever: decompose, enumerate every leaf configuration,
propagate boolean gates, and add up probability mass.  Chunk sums use
numpy's pairwise reduction and chunks are combined with ``math.fsum`` so
the 1e-12 identity checks in the test suite are meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ImpossibleEvidence, TooManyLeaves
from .evidence import EvidenceSet
from .graph import AttackGraph, NodeKind, decompose_to_leaf_probabilities, topological_order

LEAF_CAP = 25
_CHUNK_BITS = 16  # enumerate at most 2**16 configurations per chunk


@dataclass(frozen=True)
class ExactPosterior:
    node_id: int
    probability: float


def exact_access(graph: AttackGraph) -> dict[int, ExactPosterior]:
    """Exact unconditional P(node = 1) for every node of the input graph."""
    return exact_conditional(graph, None)


def exact_conditional(
    graph: AttackGraph, evidence: EvidenceSet | Mapping[int, bool] | None
) -> dict[int, ExactPosterior]:
    """Exact P(node = 1 | evidence) for every node of the input graph."""
    ev = evidence if isinstance(evidence, EvidenceSet) else EvidenceSet.for_graph(graph, evidence)
    sums, mass = _enumerate(graph, ev, graph.ids)
    if mass <= 0.0:
        raise ImpossibleEvidence(f"evidence {ev.to_string()!r} has zero probability mass")
    out = {}
    for node_id, s in sums.items():
        out[node_id] = ExactPosterior(node_id, min(max(s / mass, 0.0), 1.0))
    return out


def exact_evidence_mass(
    graph: AttackGraph, evidence: EvidenceSet | Mapping[int, bool] | None
) -> float:
    """Exact P(evidence): total probability mass of consistent configurations."""
    ev = evidence if isinstance(evidence, EvidenceSet) else EvidenceSet.for_graph(graph, evidence)
    _, mass = _enumerate(graph, ev, ())
    return mass


def _enumerate(
    graph: AttackGraph, ev: EvidenceSet, wanted: Sequence[int]
) -> tuple[dict[int, float], float]:
    """Sum of P(config) over evidence-consistent configs, per wanted node
    (restricted to configs where that node is true) and in total."""
    work = graph if graph.is_decomposed else decompose_to_leaf_probabilities(graph)
    leaf_ids = work.leaf_ids
    if len(leaf_ids) > LEAF_CAP:
        raise TooManyLeaves(
            f"exact enumeration supports at most {LEAF_CAP} leaves, got {len(leaf_ids)}"
        )

    order = topological_order(work)
    col = {node_id: t for t, node_id in enumerate(order)}
    priors = [work.node(i).local_prob for i in leaf_ids]
    leaf_cols = [col[i] for i in leaf_ids]
    gates = [
        (col[i], work.node(i).kind, np.array([col[p] for p in work.parents(i)], dtype=np.intp))
        for i in order
        if work.node(i).kind is not NodeKind.LEAF
    ]
    ev_cols = [(col[i], ev[i]) for i in ev]

    n_configs = 1 << len(leaf_ids)
    chunk = min(n_configs, 1 << _CHUNK_BITS)
    num_parts: dict[int, list[float]] = {i: [] for i in wanted}
    den_parts: list[float] = []

    for start in range(0, n_configs, chunk):
        idx = np.arange(start, min(start + chunk, n_configs), dtype=np.uint64)
        values = np.zeros((len(idx), len(order)), dtype=bool)
        mass = np.ones(len(idx))
        for bit, (leaf_col, prior) in enumerate(zip(leaf_cols, priors)):
            on = (idx >> np.uint64(bit)) & np.uint64(1) == 1
            values[:, leaf_col] = on
            mass *= np.where(on, prior, 1.0 - prior)
        for gate_col, kind, parent_cols in gates:
            if kind is NodeKind.AND:
                values[:, gate_col] = values[:, parent_cols].all(axis=1)
            else:
                values[:, gate_col] = values[:, parent_cols].any(axis=1)

        keep = np.ones(len(idx), dtype=bool)
        for ev_col, state in ev_cols:
            keep &= values[:, ev_col] == state
        kept_mass = np.where(keep, mass, 0.0)
        den_parts.append(float(kept_mass.sum()))
        for node_id in wanted:
            # positional masking (not compaction) keeps the pairwise-sum
            # grouping identical to the denominator's, so posteriors that
            # are certain given the evidence come out exactly 0 or 1
            sel = np.where(values[:, col[node_id]], kept_mass, 0.0)
            num_parts[node_id].append(float(sel.sum()))

    total = math.fsum(den_parts)
    return {i: math.fsum(parts) for i, parts in num_parts.items()}, total
