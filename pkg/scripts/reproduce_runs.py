#!/usr/bin/env python3
"""Reproduce the 11-run optimizer experiment on the crossing-sector instance.

Writes one manifest and archive per seed plus a summary JSON with the
hypervolume convergence generation and the archive C1/C2 correlation of each
run.  Expect roughly 20 minutes on a single core with default settings.

Usage: python scripts/reproduce_runs.py [--runs 11] [--out results/runs]
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from flowcap import generate_x_instance
from flowcap.cli import make_evaluator
from flowcap.nsga2 import MoeaConfig, run, write_archive_csv, write_manifest
from flowcap.scenario import scenario_hash


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=11)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--generations", type=int, default=400)
    ap.add_argument("--out", default="results/runs")
    args = ap.parse_args()

    scenario = generate_x_instance()
    evaluator = make_evaluator(scenario)
    sha = scenario_hash(scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def evaluate(genome):
        pt = evaluator.evaluate(genome)
        return (pt.c1, pt.c2)

    summary = []
    for k in range(args.runs):
        seed = args.seed + k
        t0 = time.perf_counter()
        result = run(60, evaluate, MoeaConfig(seed=seed, generations=args.generations))
        elapsed = time.perf_counter() - t0
        write_manifest(result, sha, out / f"run_{seed}.json")
        write_archive_csv(result, out / f"archive_{seed}.csv")
        trace = np.array(result.hypervolume_trace)
        converged_at = int(np.argmax(trace >= 0.99 * trace[-1]))
        pts = result.archive_points
        corr = float(np.corrcoef(pts[:, 0], pts[:, 1])[0, 1]) if len(pts) > 1 else float("nan")
        summary.append(
            {
                "seed": seed,
                "seconds": round(elapsed, 1),
                "final_hypervolume": trace[-1],
                "generation_at_99pct": converged_at,
                "archive_size": len(pts),
                "c1_c2_correlation": corr,
            }
        )
        print(f"seed {seed}: {elapsed:.0f}s, 99% at gen {converged_at}, corr {corr:.3f}")

    with open(out / "summary.json", "w") as fh:
        json.dump({"scenario_hash": sha, "runs": summary}, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out}/summary.json")


if __name__ == "__main__":
    main()
