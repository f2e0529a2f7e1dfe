"""Leaf sensitivity: how strongly a goal's probability depends on a leaf.

The fast path computes P(goal | leaf on) - P(goal | leaf off) from just
two runs.  Because the goal probability is affine in any single leaf
prior, that difference is exactly the slope of the goal probability as a
function of the prior.  The density method (assign the leaf a uniform
prior, watch the goal estimate spread out) is implemented for comparison
and yields the same information at far higher cost.

Clamping a leaf is implemented as setting its prior to 0 or 1, which for
parentless nodes coincides with conditioning whenever the prior is not
already degenerate, and stays well-defined when it is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, UnknownNode
from .graph import AttackGraph, NodeKind
from .oracle import exact_access
from .samplers import StopCriterion, run_inference

ENGINES = ("exact", "pls", "lw", "bs")
DENSITY_BINS = 50


@dataclass(frozen=True)
class SensitivityEntry:
    leaf_id: int
    goal_id: int
    sensitivity: float
    p_given_1: float
    p_given_0: float
    stderr_combined: float


@dataclass(frozen=True)
class SensitivityDensity:
    """Goal estimates under uniformly drawn priors for one leaf."""

    leaf_id: int
    goal_id: int
    samples: tuple[tuple[float, float], ...]  # (drawn prior, goal estimate)
    bin_edges: tuple[float, ...]
    masses: tuple[float, ...]  # per-bin fractions, summing to 1

    @property
    def support_width(self) -> float:
        """Width of the smallest bin range holding all the mass."""
        nonzero = [i for i, m in enumerate(self.masses) if m > 0]
        if not nonzero:
            return 0.0
        return self.bin_edges[nonzero[-1] + 1] - self.bin_edges[nonzero[0]]


def _check_engine(engine: str) -> str:
    eng = str(engine).lower()
    if eng not in ENGINES:
        raise InvalidSpec(f"engine must be one of {ENGINES}, got {engine!r}")
    return eng


def _derived_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _goal_estimate(
    graph: AttackGraph,
    goal: int,
    engine: str,
    stop: StopCriterion | None,
    seed: int,
) -> tuple[float, float]:
    """(estimate, stderr) of P(goal) with no evidence."""
    if engine == "exact":
        return exact_access(graph)[goal].probability, 0.0
    stop = stop or StopCriterion(monitored=frozenset({goal}), max_samples=200_000)
    result = run_inference(graph, None, engine, stop, seed, trace_nodes=())
    est = result.posteriors[goal]
    return est.p_hat, est.stderr


def sensitivity_onoff(
    graph: AttackGraph,
    goal: int,
    leaf: int,
    engine: str = "exact",
    stop: StopCriterion | None = None,
    seed: int = 0,
) -> SensitivityEntry:
    """Sensitivity of a goal to one leaf from two clamped runs."""
    eng = _check_engine(engine)
    if graph.node(leaf).kind is not NodeKind.LEAF:
        raise UnknownNode(f"node {leaf} is not a LEAF node")
    graph.node(goal)
    p1, se1 = _goal_estimate(
        graph.with_local_prob(leaf, 1.0), goal, eng, stop, _derived_seed(seed, leaf, 1)
    )
    p0, se0 = _goal_estimate(
        graph.with_local_prob(leaf, 0.0), goal, eng, stop, _derived_seed(seed, leaf, 0)
    )
    return SensitivityEntry(
        leaf_id=leaf,
        goal_id=goal,
        sensitivity=p1 - p0,
        p_given_1=p1,
        p_given_0=p0,
        stderr_combined=math.sqrt(se1 * se1 + se0 * se0),
    )


def sensitivity_report(
    graph: AttackGraph,
    goal: int,
    engine: str = "exact",
    stop: StopCriterion | None = None,
    seed: int = 0,
) -> list[SensitivityEntry]:
    """One entry per leaf, most sensitive first (ties by ascending id)."""
    eng = _check_engine(engine)
    graph.node(goal)
    entries = [
        sensitivity_onoff(graph, goal, leaf, eng, stop, seed) for leaf in graph.leaf_ids
    ]
    entries.sort(key=lambda e: (-e.sensitivity, e.leaf_id))
    return entries


def sensitivity_density(
    graph: AttackGraph,
    goal: int,
    leaf: int,
    n_draws: int | None = None,
    engine: str = "exact",
    stop: StopCriterion | None = None,
    seed: int = 0,
) -> SensitivityDensity:
    """Goal probability density when the leaf prior is uniform on [0, 1]."""
    eng = _check_engine(engine)
    if graph.node(leaf).kind is not NodeKind.LEAF:
        raise UnknownNode(f"node {leaf} is not a LEAF node")
    graph.node(goal)
    if n_draws is None:
        n_draws = 500 if eng == "exact" else 200
    if n_draws < 1:
        raise InvalidSpec(f"n_draws must be >= 1, got {n_draws}")

    draw_rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=int(seed), spawn_key=(leaf, 2)))
    )
    priors = draw_rng.random(n_draws)
    samples = []
    for i, u in enumerate(priors):
        est, _ = _goal_estimate(
            graph.with_local_prob(leaf, float(u)), goal, eng, stop, _derived_seed(seed, leaf, 3 + i)
        )
        samples.append((float(u), est))

    counts, edges = np.histogram([e for _, e in samples], bins=DENSITY_BINS, range=(0.0, 1.0))
    masses = counts / counts.sum()
    return SensitivityDensity(
        leaf_id=leaf,
        goal_id=goal,
        samples=tuple(samples),
        bin_edges=tuple(float(x) for x in edges),
        masses=tuple(float(m) for m in masses),
    )


def format_report(entries: list[SensitivityEntry]) -> str:
    """Two-column aligned text table: leaf id and sensitivity to 4 d.p."""
    lines = [f"{'Leaf Node':>9} | {'Sensitivity':>11}"]
    lines.append("-" * len(lines[0]))
    for e in entries:
        lines.append(f"{e.leaf_id:>9} | {e.sensitivity:>11.4f}")
    return "\n".join(lines) + "\n"


def report_to_dict(entries: list[SensitivityEntry]) -> list[dict]:
    return [
        {
            "leaf": e.leaf_id,
            "goal": e.goal_id,
            "sensitivity": e.sensitivity,
            "p_given_1": e.p_given_1,
            "p_given_0": e.p_given_0,
            "stderr": e.stderr_combined,
        }
        for e in entries
    ]
