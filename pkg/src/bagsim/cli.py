"""Command line front end.

Subcommands: ``solve`` (access probabilities), ``infer`` (posteriors
given evidence), ``sensitivity`` (per-leaf report or density CSV),
``bench`` (technique comparison grid) and ``serve`` (HTTP API).

Exit codes: 0 success, 1 input/validation problem, 2 inference/runtime
failure.  With ``--json`` stdout carries machine-readable JSON only;
table output prints probabilities to 4 decimal places.  ``BAGSIM_SEED``
provides the default seed when ``--seed`` is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    BagsimError,
    CycleError,
    InvalidSpec,
    MalformedInput,
    UnknownNode,
    UnknownNodeKind,
    ValidationError,
)
from .evidence import parse_evidence
from .graph import AttackGraph, parse_canonical, parse_mulval_csv
from .oracle import exact_access, exact_conditional
from .samplers import StopCriterion, run_inference
from .sensitivity import (
    format_report,
    report_to_dict,
    sensitivity_density,
    sensitivity_report,
)

_INPUT_ERRORS = (
    MalformedInput,
    UnknownNodeKind,
    ValidationError,
    CycleError,
    UnknownNode,
    InvalidSpec,
)


def _default_seed() -> int:
    raw = os.environ.get("BAGSIM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise MalformedInput(f"BAGSIM_SEED must be an integer, got {raw!r}") from None


def _load_graph(args) -> AttackGraph:
    if args.format == "mulval":
        if not args.arcs:
            raise MalformedInput("--format mulval requires --arcs")
        vertices = Path(args.graph).read_text(encoding="utf-8")
        arcs = Path(args.arcs).read_text(encoding="utf-8")
        return parse_mulval_csv(vertices, arcs, args.arc_direction)
    return parse_canonical(Path(args.graph).read_text(encoding="utf-8"))


def _add_graph_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("graph", help="graph file (canonical JSON, or MulVAL vertices CSV)")
    parser.add_argument(
        "--format", choices=("canonical", "mulval"), default="canonical",
        help="input format (default: canonical)",
    )
    parser.add_argument("--arcs", help="MulVAL arcs CSV (with --format mulval)")
    parser.add_argument(
        "--arc-direction", choices=("dst_src", "src_dst"), default="dst_src",
        help="column order of MulVAL arc rows (default: dst_src)",
    )


def _add_engine_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="use exhaustive enumeration")
    group.add_argument(
        "--technique", choices=("pls", "lw", "bs"), default="lw",
        help="sampling technique (default: lw)",
    )
    parser.add_argument("--error", type=float, default=0.02, help="per-node stderr target")
    parser.add_argument("--max-samples", type=int, default=200_000)
    parser.add_argument("--batch-size", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    parser.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    parser.add_argument("--output", help="write output to a file instead of stdout")


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _posterior_table(result_dict: dict) -> str:
    lines = [f"{'node':>6}  {'p':>8}  {'stderr':>8}"]
    for row in result_dict["posteriors"]:
        se = row.get("stderr")
        se_text = f"{se:8.4f}" if se is not None else "       -"
        lines.append(f"{row['id']:>6}  {row['p']:8.4f}  {se_text}")
    return "\n".join(lines) + "\n"


def _run_query(args, graph: AttackGraph, evidence) -> dict:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.exact:
        posteriors = (
            exact_conditional(graph, evidence) if len(evidence) else exact_access(graph)
        )
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
        args.technique,
        StopCriterion(per_node_error=args.error, max_samples=args.max_samples),
        seed=seed,
        batch_size=args.batch_size,
    )
    return result.to_dict(include_timing=args.timing)


def _cmd_solve(args) -> int:
    graph = _load_graph(args)
    doc = _run_query(args, graph, parse_evidence("", graph))
    _emit(args, json.dumps(doc, indent=2) + "\n" if args.json else _posterior_table(doc))
    return 0


def _cmd_infer(args) -> int:
    graph = _load_graph(args)
    evidence = parse_evidence(args.evidence, graph)
    doc = _run_query(args, graph, evidence)
    _emit(args, json.dumps(doc, indent=2) + "\n" if args.json else _posterior_table(doc))
    return 0


def _cmd_sensitivity(args) -> int:
    graph = _load_graph(args)
    if args.goal is None:
        if not graph.goals:
            raise MalformedInput("graph declares no goals; pass --goal")
        goal = min(graph.goals)
    else:
        goal = args.goal
    engine = "exact" if args.exact or args.technique is None else args.technique
    seed = args.seed if args.seed is not None else _default_seed()
    stop = StopCriterion(per_node_error=args.error, max_samples=args.max_samples)

    if args.density:
        if args.leaf is None:
            raise MalformedInput("--density requires --leaf")
        density = sensitivity_density(
            graph, goal, args.leaf, n_draws=args.draws, engine=engine,
            stop=None if engine == "exact" else stop, seed=seed,
        )
        if args.json:
            doc = {
                "leaf": density.leaf_id,
                "goal": density.goal_id,
                "samples": [list(s) for s in density.samples],
                "bin_edges": list(density.bin_edges),
                "masses": list(density.masses),
                "support_width": density.support_width,
            }
            _emit(args, json.dumps(doc, indent=2) + "\n")
        else:
            rows = ["u,estimate"]
            rows += [f"{u!r},{est!r}" for u, est in density.samples]
            _emit(args, "\n".join(rows) + "\n")
        return 0

    entries = sensitivity_report(
        graph, goal, engine=engine,
        stop=None if engine == "exact" else stop, seed=seed,
    )
    if args.json:
        _emit(args, json.dumps(report_to_dict(entries), indent=2) + "\n")
    else:
        _emit(args, format_report(entries))
    return 0


def _cmd_bench(args) -> int:
    from .bench import BenchConfig, SyntheticGraphSpec, plot_results, results_to_csv, run_comparison

    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid bench config JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedInput("bench config must be a JSON object")
    graph_defaults = None
    if "graph" in raw:
        g = dict(raw.pop("graph"))
        g.setdefault("n_nodes", 100)
        if "prior_range" in g:
            g["prior_range"] = tuple(g["prior_range"])
        if g.get("internal_prob_range") is not None:
            g["internal_prob_range"] = tuple(g["internal_prob_range"])
        graph_defaults = SyntheticGraphSpec(**g)
    known = {
        "sizes", "evidence_counts", "techniques", "target_errors", "repetitions",
        "seed", "timeout_s", "batch_size", "max_samples",
    }
    unknown = set(raw) - known
    if unknown:
        raise MalformedInput(f"unknown bench config keys: {sorted(unknown)}")
    for key in ("sizes", "evidence_counts", "techniques", "target_errors"):
        if key in raw:
            raw[key] = tuple(raw[key])
    config = BenchConfig(extended=args.extended, graph_defaults=graph_defaults, **raw)

    results = run_comparison(config)
    csv_text = results_to_csv(results)
    if args.output:
        Path(args.output).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.plots:
        for path in plot_results(results, args.plots):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(graph_dir=args.graph_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, ValueError, SystemExit) as exc:
        print(f"error: cannot serve on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bagsim", description="Bayesian attack graph inference and sensitivity analysis"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="access probabilities with no evidence")
    _add_graph_args(p_solve)
    _add_engine_args(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_infer = sub.add_parser("infer", help="posteriors given evidence")
    _add_graph_args(p_infer)
    p_infer.add_argument(
        "--evidence", default="", help='comma-separated observations, e.g. "6=y,11=n"'
    )
    _add_engine_args(p_infer)
    p_infer.set_defaults(func=_cmd_infer)

    p_sens = sub.add_parser("sensitivity", help="per-leaf sensitivity of a goal")
    _add_graph_args(p_sens)
    p_sens.add_argument("--goal", type=int, default=None)
    group = p_sens.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true")
    group.add_argument("--technique", choices=("pls", "lw", "bs"), default=None)
    p_sens.add_argument("--density", action="store_true", help="uniform-prior density for one leaf")
    p_sens.add_argument("--leaf", type=int, default=None)
    p_sens.add_argument("--draws", type=int, default=None)
    p_sens.add_argument("--error", type=float, default=0.02)
    p_sens.add_argument("--max-samples", type=int, default=200_000)
    p_sens.add_argument("--seed", type=int, default=None)
    p_sens.add_argument("--json", action="store_true")
    p_sens.add_argument("--output")
    p_sens.set_defaults(func=_cmd_sensitivity)

    p_bench = sub.add_parser("bench", help="run the technique comparison grid")
    p_bench.add_argument("config", help="bench configuration JSON file")
    p_bench.add_argument("--output", help="CSV output path (default: stdout)")
    p_bench.add_argument("--plots", help="directory for chart images")
    p_bench.add_argument(
        "--extended", action="store_true", help="allow graph sizes above 1000 nodes"
    )
    p_bench.set_defaults(func=_cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--graph-dir", help="directory of canonical JSON graphs to preload")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, ValidationError):
            for v in exc.violations:
                print(f"  - {v}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BagsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
