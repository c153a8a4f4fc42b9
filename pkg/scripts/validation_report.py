#!/usr/bin/env python3
"""Monte-Carlo cross-check of the closed-form inference on both instances.

Prints, per sector, the worst deviation between closed-form and empirical
congestion probability together with the 4-sigma binomial bound.

Usage: python scripts/validation_report.py [--samples 100000] [--instance x]
"""

import argparse
import time

import numpy as np

from flowcap import (
    Evaluator,
    McConfig,
    generate_grid_instance,
    generate_x_instance,
    nominal_intents,
    simulate,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--instance", choices=["x", "grid"], default="x")
    args = ap.parse_args()

    scenario = generate_x_instance() if args.instance == "x" else generate_grid_instance()
    intents = nominal_intents(scenario)
    ev = Evaluator(scenario)
    fld = ev.field(intents)
    t0 = time.perf_counter()
    mc = simulate(scenario, intents, McConfig(samples=args.samples, seed=args.seed))
    print(f"{args.samples} samples in {time.perf_counter() - t0:.1f}s\n")
    print(f"{'sector':>8} {'worst |dp|':>12} {'4-sigma bound':>14}")
    for sid, sf in fld.sectors.items():
        n = np.arange(sf.pmf.shape[0], dtype=float)[:, None]
        cf = ((n > sf.capacity[None, :]) * sf.pmf).sum(axis=0)
        dev = np.abs(cf - mc.congestion_freq[sid])
        bound = mc.binomial_bound(cf)
        b = int(np.argmax(dev))
        print(f"{sid:>8} {dev[b]:>12.5f} {bound[b]:>14.5f}")


if __name__ == "__main__":
    main()
