import pytest

from bagsim.bench import (
    BenchConfig,
    SyntheticGraphSpec,
    choose_evidence,
    feasible_evidence,
    generate_synthetic,
    node_depths,
    plot_results,
    results_to_csv,
    run_comparison,
)
from bagsim.errors import InvalidSpec
from bagsim.graph import NodeKind, validate
from bagsim.oracle import exact_evidence_mass


class TestGenerator:
    def test_deterministic(self):
        spec = SyntheticGraphSpec(n_nodes=40, seed=12)
        assert generate_synthetic(spec) == generate_synthetic(spec)

    def test_validates(self):
        for seed in range(8):
            graph = generate_synthetic(SyntheticGraphSpec(n_nodes=200, seed=seed))
            assert validate(graph) == []

    def test_leaf_fraction(self):
        for seed in range(50):
            graph = generate_synthetic(
                SyntheticGraphSpec(n_nodes=100, leaf_fraction=0.4, seed=seed)
            )
            leaves = len(graph.leaf_ids)
            assert 35 <= leaves <= 45

    def test_exact_node_count(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=77, seed=3))
        assert len(graph) == 77

    def test_goal_is_last_node(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=30, seed=1))
        assert graph.goals == frozenset({max(graph.ids)})

    def test_priors_within_range(self):
        graph = generate_synthetic(
            SyntheticGraphSpec(n_nodes=60, seed=2, prior_range=(0.25, 0.75))
        )
        for node in graph.nodes:
            if node.kind is NodeKind.LEAF:
                assert 0.25 <= node.local_prob <= 0.75
            else:
                assert node.local_prob == 1.0

    def test_internal_prob_range(self):
        graph = generate_synthetic(
            SyntheticGraphSpec(n_nodes=60, seed=2, internal_prob_range=(0.3, 0.9))
        )
        internal = [n for n in graph.nodes if n.kind is not NodeKind.LEAF]
        assert internal and all(0.3 <= n.local_prob <= 0.9 for n in internal)

    def test_and_or_ratio_extremes(self):
        all_or = generate_synthetic(SyntheticGraphSpec(n_nodes=30, and_or_ratio=0.0, seed=1))
        assert not any(n.kind is NodeKind.AND for n in all_or.nodes)

    def test_too_small(self):
        with pytest.raises(InvalidSpec):
            SyntheticGraphSpec(n_nodes=4)

    def test_bad_ranges(self):
        with pytest.raises(InvalidSpec):
            SyntheticGraphSpec(n_nodes=20, prior_range=(0.9, 0.3))
        with pytest.raises(InvalidSpec):
            SyntheticGraphSpec(n_nodes=20, leaf_fraction=1.5)


class TestEvidenceSelection:
    def test_prefers_deep_or_nodes(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=50, seed=6))
        ev = choose_evidence(graph, 3)
        depths = node_depths(graph)
        chosen = sorted(ev)
        assert all(graph.node(i).kind is not NodeKind.LEAF for i in chosen)
        or_depths = sorted(
            (depths[n.id] for n in graph.nodes if n.kind is NodeKind.OR), reverse=True
        )
        assert sorted((depths[i] for i in chosen), reverse=True) == or_depths[:3]

    def test_all_true_states(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=50, seed=6))
        assert all(v for v in choose_evidence(graph, 2).values())

    def test_feasible_evidence_meets_floor(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=30, seed=9))
        ev = feasible_evidence(graph, 2)
        assert exact_evidence_mass(graph, ev) >= 0.01

    def test_too_many_requested(self):
        graph = generate_synthetic(SyntheticGraphSpec(n_nodes=30, seed=9))
        with pytest.raises(InvalidSpec):
            choose_evidence(graph, 25)


class TestComparison:
    CONFIG = BenchConfig(
        sizes=(30,),
        evidence_counts=(1,),
        techniques=("pls", "lw", "bs"),
        target_errors=(0.05,),
        repetitions=1,
        seed=5,
        timeout_s=30.0,
        batch_size=2000,
        max_samples=200_000,
    )

    def test_row_count(self):
        results = run_comparison(self.CONFIG)
        assert len(results) == 3
        assert all(len(cell.runs) == 1 for cell in results)

    def test_csv_shape_and_determinism(self):
        first = results_to_csv(run_comparison(self.CONFIG))
        second = results_to_csv(run_comparison(self.CONFIG))
        lines = first.strip().splitlines()
        assert lines[0] == "technique,n_nodes,n_evidence,target_error,repetition,wall_ms,n_raw,converged"
        assert len(lines) == 4
        first_n_raw = [line.split(",")[6] for line in lines[1:]]
        second_n_raw = [line.split(",")[6] for line in second.strip().splitlines()[1:]]
        assert first_n_raw == second_n_raw

    def test_relaxing_error_never_raises_n_raw(self):
        tight = BenchConfig(
            sizes=(60,), evidence_counts=(1,), techniques=("lw",),
            target_errors=(0.02, 0.04), repetitions=1, seed=6,
            batch_size=500, max_samples=500_000,
        )
        results = run_comparison(tight)
        by_error = {cell.target_error: cell.median_n_raw for cell in results}
        assert by_error[0.04] <= by_error[0.02]

    def test_empty_techniques(self):
        config = BenchConfig(sizes=(30,), evidence_counts=(1,), techniques=(), seed=1)
        assert run_comparison(config) == []

    def test_extended_gating(self):
        config = BenchConfig(sizes=(30, 2000), evidence_counts=(), techniques=("lw",), seed=1)
        assert config.effective_sizes() == (30,)
        extended = BenchConfig(
            sizes=(30, 2000), evidence_counts=(), techniques=("lw",), seed=1, extended=True
        )
        assert extended.effective_sizes() == (30, 2000)

    def test_plots_written(self, tmp_path):
        results = run_comparison(self.CONFIG)
        written = plot_results(results, tmp_path)
        assert [p.name for p in written] == ["time_vs_error.png", "size_scaling.png"]
        assert all(p.stat().st_size > 0 for p in written)
