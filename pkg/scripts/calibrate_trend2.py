"""Wider scan: seeds x generator variants for the trend suite."""

import sys

from bagsim.bench import SyntheticGraphSpec, generate_synthetic, choose_evidence
from bagsim.errors import BagsimError
from bagsim.samplers import run_inference, StopCriterion

VARIANTS = {
    "A": dict(leaf_fraction=0.4, max_parents=3, internal_prob_range=(0.3, 0.9)),
    "B": dict(leaf_fraction=0.35, max_parents=3, internal_prob_range=(0.35, 0.95)),
    "C": dict(leaf_fraction=0.4, max_parents=2, internal_prob_range=(0.3, 0.9)),
}


def probe(g, ev, tech, max_samples, batch):
    stop = StopCriterion(per_node_error=1e-12, max_samples=max_samples)
    try:
        r = run_inference(g, ev, tech, stop, seed=777, batch_size=batch, trace_nodes=())
        return r.acceptance_rate if tech == "pls" else r.weight_stats["ess_fraction"]
    except BagsimError:
        return 0.0


def main():
    variant = sys.argv[1]
    lo, hi = int(sys.argv[2]), int(sys.argv[3])
    params = VARIANTS[variant]
    for seed in range(lo, hi):
        spec = SyntheticGraphSpec(n_nodes=200, seed=seed, **params)
        g = generate_synthetic(spec)
        try:
            ev1, ev3, ev5 = choose_evidence(g, 1), choose_evidence(g, 3), choose_evidence(g, 5)
        except BagsimError:
            continue
        acc1 = probe(g, ev1, "pls", 200_000, 100_000)
        if not 2e-3 <= acc1 <= 0.5:
            continue
        acc3 = probe(g, ev3, "pls", 300_000, 100_000)
        if not (2e-4 <= acc3 <= acc1 / 3):
            continue
        acc5 = probe(g, ev5, "pls", 1_000_000, 100_000)
        if acc5 >= 4e-6:
            continue
        lw1 = probe(g, ev1, "lw", 100_000, 50_000)
        lw5 = probe(g, ev5, "lw", 200_000, 100_000)
        bs5 = probe(g, ev5, "bs", 100_000, 50_000)
        ok = lw5 >= 8e-5 and bs5 >= 1.3e-4 and lw1 > acc1 * 1.4
        print(
            f"{variant}/seed {seed:3d}: acc1 {acc1:.3e} acc3 {acc3:.3e} acc5 {acc5:.3e} "
            f"lw1 {lw1:.3e} lw5 {lw5:.3e} bs5 {bs5:.3e} {'<<< CANDIDATE' if ok else ''}",
            flush=True,
        )


if __name__ == "__main__":
    main()
