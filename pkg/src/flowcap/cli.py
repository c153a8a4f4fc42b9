"""Command-line front end.

All commands emit plain CSV/JSON so results can be plotted externally; the
column layouts are documented in the README.  Errors leave a machine-readable
JSON object on stderr and a non-zero exit code.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import FlowcapError
from .montecarlo import McConfig, simulate
from .nsga2 import MoeaConfig, run, write_archive_csv, write_manifest
from .objectives import Evaluator
from .occupancy import congestion_pmf_direct, congestion_pmf_fft, monitor_alarms
from .scenario import (
    Scenario,
    generate_grid_instance,
    generate_x_instance,
    load_scenario,
    nominal_intents,
    save_scenario,
    scenario_hash,
)

SCENARIO_DIR_ENV = "FLOWCAP_SCENARIO_DIR"


def _default_scenario_dir() -> Path:
    return Path(os.environ.get(SCENARIO_DIR_ENV, "scenarios"))


def _load_intents(scenario: Scenario, path):
    if path is None:
        return nominal_intents(scenario)
    with open(path) as fh:
        data = json.load(fh)
    return {fid: np.asarray(v, float) for fid, v in data.items()}


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    scenario = generate_x_instance() if args.instance == "x" else generate_grid_instance()
    out = Path(args.out) if args.out else _default_scenario_dir() / f"{scenario.name}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scenario(scenario, out)
    print(out)
    return 0


def cmd_evaluate(args) -> int:
    scenario = load_scenario(args.scenario)
    intents = _load_intents(scenario, args.intents)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    ev = Evaluator(scenario, method=args.method)
    marginals = ev.marginals(intents)
    fld = ev.field(intents)
    costs = {"c1": ev.eval_c1(marginals), "c2": ev.eval_c2(marginals)}

    rows = []
    for fid, margs in marginals.items():
        for w, pdf in enumerate(margs):
            for j, mass in enumerate(pdf.mass):
                b = pdf.support_lo + j
                rows.append([fid, w, b, float(scenario.grid.midpoint(b)), repr(float(mass))])
    _write_csv(out / "marginals.csv", ["flight", "waypoint", "bin", "time_min", "mass"], rows)

    rows = []
    for curve in fld.presence_curves():
        for b in np.nonzero(curve.probs > 1e-12)[0]:
            rows.append([curve.sector_id, curve.flight_id, int(b), repr(float(curve.probs[b]))])
    _write_csv(out / "presence.csv", ["sector", "flight", "bin", "probability"], rows)

    rows = []
    for sid, sf in fld.sectors.items():
        exceed = _prob_exceed_capacity(sf)
        for b in range(scenario.grid.horizon):
            if sf.expected[b] > 1e-12:
                rows.append(
                    [
                        sid,
                        b,
                        repr(float(sf.expected[b])),
                        float(sf.capacity[b]),
                        repr(float(exceed[b])),
                    ]
                )
    _write_csv(
        out / "congestion.csv",
        ["sector", "bin", "expected_occupancy", "capacity", "p_congestion"],
        rows,
    )

    _write_csv(
        out / "alarms.csv",
        ["sector", "start_bin", "end_bin", "peak_expected", "capacity"],
        [
            [a.sector_id, a.start_bin, a.end_bin, repr(a.peak_expected), a.capacity]
            for a in monitor_alarms(fld)
        ],
    )
    with open(out / "costs.json", "w") as fh:
        json.dump(costs, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(json.dumps(costs))
    return 0


def _prob_exceed_capacity(sf) -> np.ndarray:
    n = np.arange(sf.pmf.shape[0], dtype=float)[:, None]
    return ((n > sf.capacity[None, :]) * sf.pmf).sum(axis=0)


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    intents = _load_intents(scenario, args.intents)
    ev = Evaluator(scenario)
    fld = ev.field(intents)
    mc = simulate(scenario, intents, McConfig(samples=args.samples, seed=args.seed))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    edge_tol = 1.0 / scenario.grid.horizon  # one-bin slack for interval-vs-bin effects
    rows = []
    n_fail = 0
    for sid, sf in fld.sectors.items():
        closed = {
            "congestion_probability": _prob_exceed_capacity(sf),
            "occupancy_mean": sf.expected,
        }
        empirical = {
            "congestion_probability": mc.congestion_freq[sid],
            "occupancy_mean": mc.occupancy_mean[sid],
        }
        scale = {"congestion_probability": 1.0, "occupancy_mean": max(len(sf.flight_ids), 1)}
        for metric in closed:
            cf = closed[metric]
            emp = empirical[metric]
            bound = mc.binomial_bound(cf / scale[metric]) * scale[metric] + edge_tol
            ok = np.abs(cf - emp) <= bound
            n_fail += int((~ok).sum())
            for b in range(scenario.grid.horizon):
                if cf[b] > 1e-12 or emp[b] > 1e-12:
                    rows.append(
                        [
                            sid,
                            b,
                            metric,
                            repr(float(cf[b])),
                            repr(float(emp[b])),
                            repr(float(bound[b])),
                            "pass" if ok[b] else "fail",
                        ]
                    )
    _write_csv(
        out / "validate.csv",
        ["sector", "bin", "metric", "closed_form", "monte_carlo", "bound", "status"],
        rows,
    )
    summary = {"samples": args.samples, "seed": args.seed, "failed_bins": n_fail}
    with open(out / "validate_summary.json", "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(json.dumps(summary))
    return 0


def make_evaluator(scenario: Scenario, method: str = "auto"):
    """Batched evaluator when the scenario allows it, scalar otherwise."""
    from .batch import BatchEvaluator

    try:
        return BatchEvaluator(scenario, method=method)
    except ValueError:
        return Evaluator(scenario, method=method)


def cmd_optimize(args) -> int:
    scenario = load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    evaluator = make_evaluator(scenario)
    n_genes = sum(1 + len(f.segments) for f in scenario.flights)
    sha = scenario_hash(scenario)

    def evaluate(genome):
        pt = evaluator.evaluate(genome)
        return (pt.c1, pt.c2)

    for k in range(args.runs):
        seed = args.seed + k
        config = MoeaConfig(
            population=args.population,
            generations=args.generations,
            seed=seed,
        )
        result = run(n_genes, evaluate, config)
        write_manifest(result, sha, out / f"run_{seed}.json")
        write_archive_csv(result, out / f"archive_{seed}.csv")
        print(
            json.dumps(
                {
                    "seed": seed,
                    "archive_size": len(result.archive_points),
                    "final_hypervolume": result.hypervolume_trace[-1],
                }
            )
        )
    return 0


def _time_ns(fn, arg, budget_s=0.05) -> int:
    fn(arg)  # warm up (and JIT, for the FFT path)
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn(arg)
        dt = time.perf_counter() - t0
        if dt > budget_s or reps >= 1 << 16:
            return int(dt / reps * 1e9)
        reps *= 4


def cmd_bench(args) -> int:
    if args.what != "pbin":
        raise FlowcapError(f"unknown benchmark {args.what!r}")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    sizes = []
    n = 1
    while n <= args.n_max:
        sizes.append(n)
        n *= 2
    if args.n_max not in sizes:
        sizes.append(args.n_max)
    if 300 <= args.n_max and 300 not in sizes:
        sizes.append(300)
    sizes.sort()
    rows = []
    for n in sizes:
        p = rng.random(n)
        direct_ns = _time_ns(lambda q: congestion_pmf_direct(q, cap=None), p)
        fft_ns = _time_ns(congestion_pmf_fft, p)
        rows.append([n, direct_ns, fft_ns])
        print(f"N={n} direct={direct_ns}ns fft={fft_ns}ns")
    _write_csv(args.out, ["N", "direct_ns", "fft_ns"], rows)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    scenario = load_scenario(args.scenario) if args.scenario else None
    app = create_app(scenario)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowcap",
        description="Probabilistic flow-and-capacity planning engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a benchmark scenario file")
    p.add_argument("instance", choices=["x", "grid"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="evaluate a schedule: marginals, occupancy, costs")
    p.add_argument("--scenario", required=True)
    p.add_argument("--intents", help="JSON {flight_id: [target times]}; defaults to nominal")
    p.add_argument("--method", choices=["direct", "fft", "auto"], default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate", help="Monte-Carlo vs closed-form comparison")
    p.add_argument("--scenario", required=True)
    p.add_argument("--intents")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("optimize", help="NSGA-II runs with manifests and archives")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--generations", type=int, default=400)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bench", help="timing benchmarks")
    p.add_argument("what", choices=["pbin"])
    p.add_argument("--n-max", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--scenario")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FlowcapError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except FileNotFoundError as exc:
        json.dump({"error": "FileNotFound", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
