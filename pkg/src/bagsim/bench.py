"""Benchmark harness: synthetic graph generation and technique comparison.

The generator builds layered DAGs (a leaf layer, then alternating AND/OR
layers whose nodes draw parents from earlier layers), which gives the
depth structure that makes deep evidence progressively harder for
rejection sampling.  The comparison runner records wall time and sample
counts per (size, evidence count, technique, target error) cell.  Sample
counts of converged runs are reproducible under fixed seeds; wall times
and the sample counts of timed-out runs are machine-dependent and never
asserted.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BagsimError, InvalidSpec
from .evidence import EvidenceSet
from .graph import AttackGraph, Node, NodeKind, decompose_to_leaf_probabilities, validate
from .oracle import LEAF_CAP, exact_evidence_mass
from .samplers import StopCriterion, run_inference

EVIDENCE_MASS_FLOOR = 0.01


@dataclass(frozen=True)
class SyntheticGraphSpec:
    """Recipe for a random layered attack graph.

    ``prior_range`` bounds the leaf priors.  ``internal_prob_range``, when
    set, draws AND/OR local probabilities from that range (step success
    likelihoods, as in graphs found in the wild); by default internal
    nodes are deterministic gates.
    """

    n_nodes: int
    leaf_fraction: float = 0.4
    and_or_ratio: float = 1.0
    max_parents: int = 3
    prior_range: tuple[float, float] = (0.3, 0.9)
    seed: int = 0
    internal_prob_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.n_nodes < 5:
            raise InvalidSpec(f"n_nodes must be >= 5, got {self.n_nodes}")
        if not 0.0 < self.leaf_fraction < 1.0:
            raise InvalidSpec(f"leaf_fraction must be in (0, 1), got {self.leaf_fraction}")
        if self.and_or_ratio < 0:
            raise InvalidSpec(f"and_or_ratio must be >= 0, got {self.and_or_ratio}")
        if self.max_parents < 1:
            raise InvalidSpec(f"max_parents must be >= 1, got {self.max_parents}")
        for rng_pair in (self.prior_range, self.internal_prob_range):
            if rng_pair is None:
                continue
            lo, hi = rng_pair
            if not (0.0 <= lo <= hi <= 1.0):
                raise InvalidSpec(f"probability range {rng_pair} must satisfy 0 <= lo <= hi <= 1")


def generate_synthetic(spec: SyntheticGraphSpec) -> AttackGraph:
    """Deterministic random graph for the given spec; always validates."""
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=int(spec.seed), spawn_key=(0xB46,)))
    )
    n_leaves = max(1, round(spec.n_nodes * spec.leaf_fraction))
    n_internal = spec.n_nodes - n_leaves
    if n_internal < 1:
        raise InvalidSpec("spec leaves no room for internal nodes")

    ratio = spec.and_or_ratio
    n_and = round(n_internal * ratio / (1.0 + ratio)) if ratio > 0 else 0
    n_or = n_internal - n_and

    # wide, fairly shallow layering, the shape scan-derived enterprise
    # graphs take: depth tracks network hops, width tracks host count
    width = max(3, round(n_internal / 7))
    layer_kinds: list[NodeKind] = []
    remaining = {NodeKind.AND: n_and, NodeKind.OR: n_or}
    kind_cycle = [NodeKind.AND, NodeKind.OR]
    turn = 0
    layers: list[list[NodeKind]] = []
    while remaining[NodeKind.AND] + remaining[NodeKind.OR] > 0:
        kind = kind_cycle[turn % 2]
        if remaining[kind] == 0:
            kind = kind_cycle[(turn + 1) % 2]
        take = min(width, remaining[kind])
        layers.append([kind] * take)
        remaining[kind] -= take
        turn += 1

    lo, hi = spec.prior_range
    nodes = [
        Node(i, NodeKind.LEAF, f"leaf {i}", float(lo + (hi - lo) * rng.random()))
        for i in range(n_leaves)
    ]
    edges: list[tuple[int, int]] = []
    # bipartite multi-hop shape, as rule-based generators emit it: a step
    # (AND) pairs one recently gained condition with leaf preconditions;
    # a condition (OR) aggregates a few recent alternative steps.  Parents
    # come from the most recent layers so depth means real chains.
    recent_and: list[list[int]] = []
    recent_or: list[list[int]] = [list(range(n_leaves))]
    next_id = n_leaves
    for layer in layers:
        layer_ids: list[int] = []
        kind = layer[0] if layer else NodeKind.AND
        if kind is NodeKind.AND:
            pool = [i for lay in recent_or[-3:] for i in lay]
        else:
            pool = [i for lay in recent_and[-3:] for i in lay] or list(range(n_leaves))
        for kind in layer:
            node_id = next_id
            next_id += 1
            deg = min(int(rng.integers(1, spec.max_parents + 1)), len(pool))
            if kind is NodeKind.AND:
                chain = pool[int(rng.integers(0, len(pool)))]
                n_extra = max(deg - 1, 1 if chain >= n_leaves else 0)
                extra = rng.choice(n_leaves, size=n_extra, replace=False)
                parent_ids = sorted({chain, *(int(x) for x in extra)})
            else:
                picked = rng.choice(len(pool), size=deg, replace=False)
                parent_ids = sorted({pool[i] for i in picked})
            for p in parent_ids:
                edges.append((p, node_id))
            if spec.internal_prob_range is not None:
                alo, ahi = spec.internal_prob_range
                prob = float(alo + (ahi - alo) * rng.random())
            else:
                prob = 1.0
            nodes.append(Node(node_id, kind, f"{kind.value.lower()} {node_id}", prob))
            layer_ids.append(node_id)
        if layer and layer[0] is NodeKind.AND:
            recent_and.append(layer_ids)
        else:
            recent_or.append(layer_ids)

    goal = next_id - 1
    graph = AttackGraph(nodes, edges, goals=[goal])
    violations = validate(graph)
    if violations:  # generator bug guard, not an expected path
        raise InvalidSpec(f"generated graph is invalid: {violations}")
    return graph


# ---------------------------------------------------------------------------
# evidence selection


def node_depths(graph: AttackGraph) -> dict[int, int]:
    """Longest path from any leaf, computed over a topological sweep."""
    from .graph import topological_order

    depth: dict[int, int] = {}
    for node_id in topological_order(graph):
        parents = graph.parents(node_id)
        depth[node_id] = 0 if not parents else 1 + max(depth[p] for p in parents)
    return depth


def choose_evidence(graph: AttackGraph, count: int, state: bool = True) -> EvidenceSet:
    """Deepest OR nodes first (then AND), all observed in ``state``."""
    depth = node_depths(graph)
    candidates = [
        n.id
        for n in sorted(
            graph.nodes,
            key=lambda n: (n.kind is not NodeKind.OR, -depth[n.id], n.id),
        )
        if n.kind is not NodeKind.LEAF
    ]
    if count > len(candidates):
        raise InvalidSpec(f"graph has only {len(candidates)} internal nodes, need {count}")
    return EvidenceSet({i: state for i in candidates[:count]})


def feasible_evidence(
    graph: AttackGraph, count: int, state: bool = True, mass_floor: float = EVIDENCE_MASS_FLOOR
) -> EvidenceSet:
    """First depth-ordered evidence window that is not (near-)impossible.

    Small graphs are checked exactly against ``mass_floor``; larger ones
    get a likelihood-weighting probe that must produce nonzero weight.
    """
    depth = node_depths(graph)
    candidates = [
        n.id
        for n in sorted(
            graph.nodes,
            key=lambda n: (n.kind is not NodeKind.OR, -depth[n.id], n.id),
        )
        if n.kind is not NodeKind.LEAF
    ]
    if count > len(candidates):
        raise InvalidSpec(f"graph has only {len(candidates)} internal nodes, need {count}")
    enumerable = len(decompose_to_leaf_probabilities(graph).leaf_ids) <= min(LEAF_CAP, 16)
    for start in range(len(candidates) - count + 1):
        ev = EvidenceSet({i: state for i in candidates[start : start + count]})
        if enumerable:
            if exact_evidence_mass(graph, ev) >= mass_floor:
                return ev
        else:
            try:
                probe = run_inference(
                    graph, ev, "lw",
                    StopCriterion(per_node_error=1.0, max_samples=4000),
                    seed=20_000 + start, batch_size=4000, trace_nodes=(),
                )
            except BagsimError:
                continue
            if probe.weight_stats["ess"] > 0:
                return ev
    raise InvalidSpec(f"no feasible {count}-node evidence set found")


# ---------------------------------------------------------------------------
# comparison runner


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = (100, 200, 500, 1000)
    evidence_counts: tuple[int, ...] = (1, 3)
    techniques: tuple[str, ...] = ("pls", "lw", "bs")
    target_errors: tuple[float, ...] = (0.02,)
    repetitions: int = 1
    seed: int = 0
    timeout_s: float = 120.0
    batch_size: int = 1000
    max_samples: int = 50_000_000
    extended: bool = False
    graph_defaults: SyntheticGraphSpec | None = None

    def effective_sizes(self) -> tuple[int, ...]:
        if self.extended:
            return self.sizes
        return tuple(s for s in self.sizes if s <= 1000)


@dataclass(frozen=True)
class BenchRun:
    repetition: int
    wall_ms: float
    n_raw: int
    converged: bool
    timed_out: bool
    error: str | None = None


@dataclass
class BenchResult:
    technique: str
    n_nodes: int
    n_evidence: int
    target_error: float
    runs: list[BenchRun] = field(default_factory=list)

    @property
    def mean_wall_ms(self) -> float:
        return statistics.fmean(r.wall_ms for r in self.runs)

    @property
    def min_wall_ms(self) -> float:
        return min(r.wall_ms for r in self.runs)

    @property
    def max_wall_ms(self) -> float:
        return max(r.wall_ms for r in self.runs)

    @property
    def median_n_raw(self) -> float:
        return statistics.median(r.n_raw for r in self.runs)

    @property
    def any_timed_out(self) -> bool:
        return any(r.timed_out for r in self.runs)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.runs)


def _graph_for_size(config: BenchConfig, size: int) -> AttackGraph:
    base = config.graph_defaults
    seed = int(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(size,)).generate_state(
            1, np.uint64
        )[0]
    )
    if base is None:
        return generate_synthetic(SyntheticGraphSpec(n_nodes=size, seed=seed))
    return generate_synthetic(
        SyntheticGraphSpec(
            n_nodes=size,
            leaf_fraction=base.leaf_fraction,
            and_or_ratio=base.and_or_ratio,
            max_parents=base.max_parents,
            prior_range=base.prior_range,
            seed=seed,
            internal_prob_range=base.internal_prob_range,
        )
    )


def run_comparison(config: BenchConfig) -> list[BenchResult]:
    """Seeded grid run over sizes x evidence counts x techniques x errors."""
    results: list[BenchResult] = []
    for size in config.effective_sizes():
        graph = _graph_for_size(config, size)
        for n_evidence in config.evidence_counts:
            evidence = (
                feasible_evidence(graph, n_evidence) if n_evidence else EvidenceSet()
            )
            for technique in config.techniques:
                for target_error in config.target_errors:
                    cell = BenchResult(technique, size, n_evidence, target_error)
                    for rep in range(config.repetitions):
                        run_seed = int(
                            np.random.SeedSequence(
                                entropy=config.seed,
                                spawn_key=(
                                    size,
                                    n_evidence,
                                    config.techniques.index(technique),
                                    config.target_errors.index(target_error),
                                    rep,
                                ),
                            ).generate_state(1, np.uint64)[0]
                        )
                        try:
                            res = run_inference(
                                graph,
                                evidence,
                                technique,
                                StopCriterion(
                                    per_node_error=target_error,
                                    max_samples=config.max_samples,
                                ),
                                seed=run_seed,
                                batch_size=config.batch_size,
                                trace_nodes=(),
                                time_budget_s=config.timeout_s,
                            )
                            cell.runs.append(
                                BenchRun(
                                    rep, res.wall_ms, res.n_raw, res.converged, res.timed_out
                                )
                            )
                        except BagsimError as exc:
                            cell.runs.append(
                                BenchRun(rep, 0.0, 0, False, False, error=str(exc))
                            )
                    results.append(cell)
    return results


CSV_HEADER = (
    "technique,n_nodes,n_evidence,target_error,repetition,wall_ms,n_raw,converged"
)


def results_to_csv(results: list[BenchResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER.split(","))
    for cell in results:
        for run in cell.runs:
            writer.writerow(
                [
                    cell.technique,
                    cell.n_nodes,
                    cell.n_evidence,
                    cell.target_error,
                    run.repetition,
                    f"{run.wall_ms:.3f}",
                    run.n_raw,
                    str(run.converged).lower(),
                ]
            )
    return buf.getvalue()


def plot_results(results: list[BenchResult], out_dir: str | Path) -> list[Path]:
    """Static charts: time vs target error and time vs graph size."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    by_evidence: dict[int, list[BenchResult]] = {}
    for cell in results:
        by_evidence.setdefault(cell.n_evidence, []).append(cell)

    fig, axes = plt.subplots(
        1, max(1, len(by_evidence)), figsize=(5 * max(1, len(by_evidence)), 4), squeeze=False
    )
    for ax, (n_ev, cells) in zip(axes[0], sorted(by_evidence.items())):
        for technique in sorted({c.technique for c in cells}):
            pts = sorted(
                (c.target_error, c.mean_wall_ms)
                for c in cells
                if c.technique == technique
            )
            if pts:
                ax.plot(*zip(*pts), marker="o", label=technique)
        ax.set_xlabel("target per-node error")
        ax.set_ylabel("mean wall time (ms)")
        ax.set_title(f"{n_ev} evidence node(s)")
        ax.set_yscale("log")
        ax.invert_xaxis()
        ax.legend()
    fig.tight_layout()
    path = out / "time_vs_error.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    combos = sorted({(c.technique, c.n_evidence) for c in results})
    for technique, n_ev in combos:
        pts = sorted(
            (c.n_nodes, c.mean_wall_ms)
            for c in results
            if c.technique == technique and c.n_evidence == n_ev
        )
        if pts:
            ax.plot(*zip(*pts), marker="o", label=f"{technique}, {n_ev} ev")
    ax.set_xlabel("graph size (nodes)")
    ax.set_ylabel("mean wall time (ms)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    path = out / "size_scaling.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
