import json

import pytest

from bagsim.cli import main
from bagsim.graph import serialize_canonical
from bagsim.oracle import exact_access, exact_conditional


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


CYCLIC_DOC = {
    "nodes": [
        {"id": 0, "type": "LEAF", "label": "", "prob": 0.5},
        {"id": 1, "type": "OR"},
        {"id": 2, "type": "OR"},
    ],
    "edges": [[0, 1], [1, 2], [2, 1]],
}


@pytest.fixture
def cyclic_file(tmp_path):
    path = tmp_path / "cyclic.json"
    path.write_text(json.dumps(CYCLIC_DOC), encoding="utf-8")
    return path


@pytest.fixture
def two_leaf_or_file(tmp_path, two_leaf_or):
    path = tmp_path / "tiny.json"
    path.write_text(serialize_canonical(two_leaf_or), encoding="utf-8")
    return path


class TestSolve:
    def test_exact_matches_oracle(self, capsys, enterprise_file, enterprise):
        code, out, _ = run_cli(capsys, "solve", str(enterprise_file), "--exact", "--json")
        assert code == 0
        doc = json.loads(out)
        expected = exact_access(enterprise)[1].probability
        row = next(r for r in doc["posteriors"] if r["id"] == 1)
        assert row["p"] == expected

    def test_table_format(self, capsys, enterprise_file):
        code, out, _ = run_cli(capsys, "solve", str(enterprise_file), "--exact")
        assert code == 0
        line = next(l for l in out.splitlines() if l.split()[0] == "1")
        assert line.split()[1] == "0.8370"

    def test_deterministic_under_seed(self, capsys, enterprise_file):
        args = ("solve", str(enterprise_file), "--technique", "lw", "--error", "0.02",
                "--seed", "7", "--json")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second

    def test_cyclic_graph_exits_1(self, capsys, cyclic_file):
        code, _, err = run_cli(capsys, "solve", str(cyclic_file), "--exact")
        assert code == 1
        assert "cycle" in err

    def test_missing_file_exits_1(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "solve", str(tmp_path / "nope.json"))
        assert code == 1

    def test_output_file(self, capsys, enterprise_file, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run_cli(
            capsys, "solve", str(enterprise_file), "--exact", "--json",
            "--output", str(target),
        )
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["technique"] == "exact"


class TestInfer:
    def test_matches_oracle_within_tolerance(self, capsys, enterprise_file, enterprise):
        code, out, _ = run_cli(
            capsys, "infer", str(enterprise_file), "--evidence", "6=y",
            "--technique", "lw", "--error", "0.01", "--seed", "3", "--json",
        )
        assert code == 0
        doc = json.loads(out)
        row = next(r for r in doc["posteriors"] if r["id"] == 1)
        exact = exact_conditional(enterprise, {6: True})[1].probability
        assert abs(row["p"] - exact) <= 4 * row["stderr"]

    def test_empty_evidence_equals_solve(self, capsys, enterprise_file):
        _, solve_out, _ = run_cli(
            capsys, "solve", str(enterprise_file), "--technique", "lw", "--seed", "5", "--json"
        )
        _, infer_out, _ = run_cli(
            capsys, "infer", str(enterprise_file), "--evidence", "",
            "--technique", "lw", "--seed", "5", "--json",
        )
        assert solve_out == infer_out

    def test_unknown_evidence_node_exits_1(self, capsys, enterprise_file):
        code, _, err = run_cli(capsys, "infer", str(enterprise_file), "--evidence", "99=y")
        assert code == 1
        assert "99" in err

    def test_impossible_evidence_exits_2(self, capsys, tmp_path, two_leaf_or):
        broken = two_leaf_or.with_local_prob(2, 0.0)
        path = tmp_path / "broken.json"
        path.write_text(serialize_canonical(broken), encoding="utf-8")
        code, _, err = run_cli(
            capsys, "infer", str(path), "--evidence", "2=y",
            "--technique", "pls", "--max-samples", "2000",
        )
        assert code == 2

    def test_exact_conditional(self, capsys, enterprise_file):
        code, out, _ = run_cli(
            capsys, "infer", str(enterprise_file), "--evidence", "17=n", "--exact", "--json"
        )
        doc = json.loads(out)
        assert next(r for r in doc["posteriors"] if r["id"] == 1)["p"] == 0.0


class TestSensitivityCmd:
    def test_exact_report_table(self, capsys, enterprise_file):
        code, out, _ = run_cli(
            capsys, "sensitivity", str(enterprise_file), "--goal", "1", "--exact"
        )
        assert code == 0
        first_row = out.strip().splitlines()[2]
        assert first_row.split("|")[0].strip() == "17"

    def test_goal_defaults_to_graph_goal(self, capsys, enterprise_file):
        _, explicit, _ = run_cli(
            capsys, "sensitivity", str(enterprise_file), "--goal", "1", "--exact"
        )
        _, implicit, _ = run_cli(capsys, "sensitivity", str(enterprise_file), "--exact")
        assert explicit == implicit

    def test_missing_goal_without_graph_goals(self, capsys, tmp_path, two_leaf_or):
        from bagsim.graph import AttackGraph

        bare = AttackGraph(two_leaf_or.nodes, two_leaf_or.edges, goals=[])
        path = tmp_path / "bare.json"
        path.write_text(serialize_canonical(bare), encoding="utf-8")
        code, _, err = run_cli(capsys, "sensitivity", str(path), "--exact")
        assert code == 1
        assert "--goal" in err

    def test_density_csv(self, capsys, two_leaf_or_file):
        code, out, _ = run_cli(
            capsys, "sensitivity", str(two_leaf_or_file), "--goal", "2",
            "--exact", "--density", "--leaf", "0", "--draws", "25",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "u,estimate"
        assert len(lines) == 26
        u, est = map(float, lines[1].split(","))
        assert est == pytest.approx(0.4 + 0.4 * u, abs=1e-12)

    def test_density_requires_leaf(self, capsys, two_leaf_or_file):
        code, _, err = run_cli(
            capsys, "sensitivity", str(two_leaf_or_file), "--goal", "2", "--density"
        )
        assert code == 1


class TestMulval:
    def test_adapter_directions(self, capsys, tmp_path):
        vertices = tmp_path / "v.csv"
        arcs = tmp_path / "a.csv"
        vertices.write_text('0,"a","LEAF",1.0\n1,"b","OR",0.5\n', encoding="utf-8")
        arcs.write_text("1,0,-1\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys, "solve", str(vertices), "--format", "mulval",
            "--arcs", str(arcs), "--exact", "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert next(r for r in doc["posteriors"] if r["id"] == 1)["p"] == 0.5

        code, _, err = run_cli(
            capsys, "solve", str(vertices), "--format", "mulval",
            "--arcs", str(arcs), "--arc-direction", "src_dst", "--exact",
        )
        assert code == 1

    def test_mulval_requires_arcs(self, capsys, tmp_path):
        vertices = tmp_path / "v.csv"
        vertices.write_text('0,"a","LEAF",1.0\n', encoding="utf-8")
        code, _, err = run_cli(capsys, "solve", str(vertices), "--format", "mulval")
        assert code == 1


class TestBenchCmd:
    CONFIG = {
        "sizes": [30],
        "evidence_counts": [1],
        "techniques": ["pls", "lw"],
        "target_errors": [0.05],
        "repetitions": 1,
        "seed": 5,
        "batch_size": 2000,
        "max_samples": 100000,
    }

    def test_row_count_and_determinism(self, capsys, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text(json.dumps(self.CONFIG), encoding="utf-8")
        code, first, _ = run_cli(capsys, "bench", str(config))
        assert code == 0
        lines = first.strip().splitlines()
        assert len(lines) == 3  # header + 2 techniques
        _, second, _ = run_cli(capsys, "bench", str(config))
        first_n = [l.split(",")[6] for l in lines[1:]]
        second_n = [l.split(",")[6] for l in second.strip().splitlines()[1:]]
        assert first_n == second_n

    def test_extended_gating(self, capsys, tmp_path):
        config = tmp_path / "bench.json"
        doc = dict(self.CONFIG, sizes=[30, 2000])
        config.write_text(json.dumps(doc), encoding="utf-8")
        code, out, _ = run_cli(capsys, "bench", str(config))
        assert code == 0
        sizes = {line.split(",")[1] for line in out.strip().splitlines()[1:]}
        assert sizes == {"30"}

    def test_bad_config_exits_1(self, capsys, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text('{"sizes": [30], "bogus_key": 1}', encoding="utf-8")
        code, _, err = run_cli(capsys, "bench", str(config))
        assert code == 1


class TestSeedEnv:
    def test_bagsim_seed_env(self, capsys, monkeypatch, enterprise_file):
        monkeypatch.setenv("BAGSIM_SEED", "42")
        _, env_out, _ = run_cli(
            capsys, "solve", str(enterprise_file), "--technique", "lw", "--json"
        )
        monkeypatch.delenv("BAGSIM_SEED")
        _, explicit_out, _ = run_cli(
            capsys, "solve", str(enterprise_file), "--technique", "lw",
            "--seed", "42", "--json",
        )
        assert env_out == explicit_out

    def test_bad_env_seed(self, capsys, monkeypatch, enterprise_file):
        monkeypatch.setenv("BAGSIM_SEED", "lots")
        code, _, err = run_cli(capsys, "solve", str(enterprise_file), "--technique", "lw")
        assert code == 1
