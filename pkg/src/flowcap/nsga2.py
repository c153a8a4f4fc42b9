"""NSGA-II over [0,1]^n genomes, plus the 2-D hypervolume indicator.

The RNG is a single numpy PCG64 stream seeded from the config; objective
evaluation consumes no randomness, so runs are bit-reproducible from the
seed alone and populations may be evaluated in any order.

The per-generation hypervolume trace is measured on the cumulative
non-dominated archive of every point evaluated so far (which makes the trace
provably non-decreasing); the returned archive is that set truncated to the
configured size by crowding distance.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

RNG_ALGORITHM = "numpy-PCG64"


@dataclass(frozen=True)
class MoeaConfig:
    population: int = 100
    generations: int = 400
    crossover_prob: float = 0.8
    sbx_eta: float = 20.0
    mutation_prob: float = 0.2
    mutation_eta: float = 20.0
    seed: int = 0
    archive_size: int = 100

    def __post_init__(self):
        if not (0 <= self.crossover_prob <= 1 and 0 <= self.mutation_prob <= 1):
            raise ValueError("probabilities must be in [0, 1]")
        if min(self.population, self.generations, self.archive_size) <= 0:
            raise ValueError("counts must be positive")


def fast_nondominated_sort(points: np.ndarray) -> List[np.ndarray]:
    """Partition points into Pareto fronts (minimization, any objective count)."""
    points = np.asarray(points, float)
    n = len(points)
    le = np.all(points[:, None, :] <= points[None, :, :], axis=2)
    lt = np.any(points[:, None, :] < points[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0)
    fronts = []
    assigned = np.zeros(n, dtype=bool)
    while not assigned.all():
        current = np.nonzero((n_dominators == 0) & ~assigned)[0]
        fronts.append(current)
        assigned[current] = True
        n_dominators = n_dominators - dom[current].sum(axis=0)
    return fronts


def crowding_distance(points: np.ndarray) -> np.ndarray:
    """Normalized neighbor-gap sums; boundary points get +inf."""
    points = np.asarray(points, float)
    n, m = points.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for j in range(m):
        order = np.argsort(points[:, j], kind="stable")
        col = points[order, j]
        span = col[-1] - col[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def sbx_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    eta: float,
    prob: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover; children stay in [0,1]."""
    a = np.asarray(parent_a, float)
    b = np.asarray(parent_b, float)
    if rng.random() >= prob:
        return a.copy(), b.copy()
    u = rng.random(len(a))
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    c1 = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
    c2 = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b)
    return np.clip(c1, 0.0, 1.0), np.clip(c2, 0.0, 1.0)


def polynomial_mutation(
    genome: np.ndarray, eta: float, prob: float, rng: np.random.Generator
) -> np.ndarray:
    """Bounded polynomial mutation on [0,1] genes."""
    x = np.asarray(genome, float).copy()
    hit = rng.random(len(x)) < prob
    if not hit.any():
        return x
    u = rng.random(len(x))
    g = x[hit]
    uu = u[hit]
    exp = 1.0 / (eta + 1.0)
    lower_delta = (2.0 * uu + (1.0 - 2.0 * uu) * (1.0 - g) ** (eta + 1.0)) ** exp - 1.0
    upper_delta = 1.0 - (2.0 * (1.0 - uu) + (2.0 * uu - 1.0) * g ** (eta + 1.0)) ** exp
    x[hit] = g + np.where(uu < 0.5, lower_delta, upper_delta)
    return np.clip(x, 0.0, 1.0)


def hypervolume(points: np.ndarray, reference: np.ndarray) -> float:
    """Exact 2-D hypervolume: staircase rectangle sum against the reference."""
    points = np.asarray(points, float).reshape(-1, 2)
    reference = np.asarray(reference, float)
    keep = np.all(points < reference, axis=1)
    points = points[keep]
    if len(points) == 0:
        return 0.0
    order = np.lexsort((points[:, 1], points[:, 0]))
    points = points[order]
    hv = 0.0
    best_y = reference[1]
    for x, y in points:
        if y < best_y:
            hv += (reference[0] - x) * (best_y - y)
            best_y = y
    return hv


def _nondominated_2d(points: np.ndarray) -> np.ndarray:
    """Indices of the non-dominated subset of 2-D points (duplicates deduped)."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    keep = []
    best_y = np.inf
    prev = None
    for i in order:
        x, y = points[i]
        if prev is not None and x == prev[0] and y == prev[1]:
            continue
        if y < best_y:
            keep.append(i)
            best_y = y
            prev = (x, y)
    return np.array(keep, dtype=int)


@dataclass
class ParetoArchive:
    """Cumulative non-dominated set of (genome, objectives) pairs."""

    capacity: int
    genomes: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def update(self, genomes: np.ndarray, points: np.ndarray) -> None:
        if self.genomes.size == 0:
            all_g, all_p = genomes, points
        else:
            all_g = np.vstack([self.genomes, genomes])
            all_p = np.vstack([self.points, points])
        keep = _nondominated_2d(all_p)
        self.genomes = all_g[keep]
        self.points = all_p[keep]

    def truncated(self) -> Tuple[np.ndarray, np.ndarray]:
        """Archive capped at capacity by dropping lowest crowding distance."""
        if len(self.points) <= self.capacity:
            return self.genomes.copy(), self.points.copy()
        dist = crowding_distance(self.points)
        keep = np.sort(np.argsort(-dist, kind="stable")[: self.capacity])
        return self.genomes[keep], self.points[keep]


@dataclass
class MoeaResult:
    config: MoeaConfig
    archive_genomes: np.ndarray
    archive_points: np.ndarray
    hypervolume_trace: List[float]
    reference_point: Tuple[float, float]
    gen_seconds: List[float]


def _tournament(rng, ranks, crowd) -> int:
    i, j = rng.integers(0, len(ranks), size=2)
    if ranks[i] != ranks[j]:
        return i if ranks[i] < ranks[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def _rank_and_crowd(points: np.ndarray):
    ranks = np.empty(len(points), dtype=int)
    crowd = np.empty(len(points))
    fronts = fast_nondominated_sort(points)
    for r, front in enumerate(fronts):
        ranks[front] = r
        crowd[front] = crowding_distance(points[front])
    return ranks, crowd, fronts


def run(
    n_genes: int,
    evaluate: Callable[[np.ndarray], Tuple[float, float]],
    config: MoeaConfig,
    progress: Optional[Callable[[int], None]] = None,
) -> MoeaResult:
    """Standard NSGA-II generational loop.

    ``evaluate`` maps a genome to (c1, c2) and must be deterministic: the
    single RNG stream is consumed only by initialization and variation.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    N = config.population
    pop = rng.random((N, n_genes))
    objs = np.array([evaluate(g) for g in pop])

    archive = ParetoArchive(config.archive_size)
    archive.update(pop, objs)
    snapshots = [archive.points.copy()]
    max_seen = objs.max(axis=0)
    gen_seconds: List[float] = []

    ranks, crowd, _ = _rank_and_crowd(objs)
    for gen in range(config.generations):
        t0 = time.perf_counter()
        children = []
        while len(children) < N:
            pa = pop[_tournament(rng, ranks, crowd)]
            pb = pop[_tournament(rng, ranks, crowd)]
            ca, cb = sbx_crossover(pa, pb, config.sbx_eta, config.crossover_prob, rng)
            children.append(polynomial_mutation(ca, config.mutation_eta, config.mutation_prob, rng))
            if len(children) < N:
                children.append(
                    polynomial_mutation(cb, config.mutation_eta, config.mutation_prob, rng)
                )
        children = np.array(children)
        child_objs = np.array([evaluate(g) for g in children])

        combined = np.vstack([pop, children])
        combined_objs = np.vstack([objs, child_objs])
        ranks_c, crowd_c, fronts = _rank_and_crowd(combined_objs)
        selected: List[int] = []
        for front in fronts:
            if len(selected) + len(front) <= N:
                selected.extend(front.tolist())
            else:
                room = N - len(selected)
                order = np.argsort(-crowd_c[front], kind="stable")
                selected.extend(front[order[:room]].tolist())
                break
        selected = np.array(selected)
        pop = combined[selected]
        objs = combined_objs[selected]
        ranks, crowd, _ = _rank_and_crowd(objs)

        archive.update(children, child_objs)
        snapshots.append(archive.points.copy())
        max_seen = np.maximum(max_seen, child_objs.max(axis=0))
        gen_seconds.append(time.perf_counter() - t0)
        if progress is not None:
            progress(gen)

    reference = np.where(max_seen > 0, 1.1 * max_seen, 1.0)
    trace = [hypervolume(snap, reference) for snap in snapshots[1:]]
    ag, ap = archive.truncated()
    return MoeaResult(config, ag, ap, trace, (float(reference[0]), float(reference[1])), gen_seconds)


# ---------------------------------------------------------------------------
# Run artifacts


def manifest_dict(result: MoeaResult, scenario_hash: str) -> dict:
    cfg = result.config
    return {
        "rng": RNG_ALGORITHM,
        "seed": cfg.seed,
        "scenario_hash": scenario_hash,
        "config": {
            "population": cfg.population,
            "generations": cfg.generations,
            "crossover_prob": cfg.crossover_prob,
            "sbx_eta": cfg.sbx_eta,
            "mutation_prob": cfg.mutation_prob,
            "mutation_eta": cfg.mutation_eta,
            "archive_size": cfg.archive_size,
        },
        "reference_point": list(result.reference_point),
        "hypervolume_trace": result.hypervolume_trace,
        "gen_seconds": result.gen_seconds,
        "archive": [
            {"genome": g.tolist(), "c1": float(p[0]), "c2": float(p[1])}
            for g, p in zip(result.archive_genomes, result.archive_points)
        ],
    }


def write_manifest(result: MoeaResult, scenario_hash: str, path) -> None:
    with open(path, "w") as fh:
        json.dump(manifest_dict(result, scenario_hash), fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_archive_csv(result: MoeaResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "c1", "c2"])
        for i, (c1, c2) in enumerate(result.archive_points):
            writer.writerow([i, repr(float(c1)), repr(float(c2))])
