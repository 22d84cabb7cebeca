"""Node-removal and edge-deletion robustness experiments.

Every repetition draws from its own generator seeded by (seed, level, rep),
so serial and threaded runs produce the same numbers.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import MEASURES, CentralityVector, as_digraph, centrality, path_stats, spectral_radius

TOP_SHARE = 0.10


def _rng(seed, level: int, rep: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), level, rep])


def _map(fn, items, jobs: int):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@dataclass(frozen=True)
class RemovalPlan:
    mode: str
    fractions: tuple[float, ...]
    reps: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("failure", "attack"):
            raise ValueError(f"mode must be 'failure' or 'attack', not {self.mode!r}")
        fr = tuple(float(f) for f in self.fractions)
        if any(not 0.0 <= f < 1.0 for f in fr):
            raise ValueError("fractions must lie in [0, 1)")
        if list(fr) != sorted(fr):
            raise ValueError("fractions must be ascending")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        object.__setattr__(self, "fractions", fr)
        # the attack order is fixed, so repetitions would be identical
        if self.mode == "attack":
            object.__setattr__(self, "reps", 1)


@dataclass(frozen=True)
class RemovalPoint:
    mode: str
    fraction: float
    mean_diameter: float
    mean_avg_path_length: float
    reps: int
    diameters: tuple[int, ...] = field(default=(), repr=False)
    path_lengths: tuple[float, ...] = field(default=(), repr=False)


def attack_order(g) -> np.ndarray:
    """Node positions by descending total degree, ties by position."""
    return np.argsort(-g.total_degree(), kind="stable")


def node_removal_experiment(net, plan: RemovalPlan, jobs: int = 1) -> list[RemovalPoint]:
    """Diameter and mean path length after removing ``ceil(f * |V|)`` nodes."""
    g = as_digraph(net)
    n = g.n_nodes
    if n == 0:
        raise ValueError("node removal needs a non-empty graph")
    order = attack_order(g) if plan.mode == "attack" else None
    out = []
    for li, f in enumerate(plan.fractions):
        k = math.ceil(f * n)
        if k >= n:
            raise ValueError(f"fraction {f} removes every node")

        def one(rep, f=f, k=k, li=li):
            keep = np.ones(n, dtype=bool)
            if plan.mode == "attack":
                keep[order[:k]] = False
            else:
                keep[_rng(plan.seed, li, rep).choice(n, size=k, replace=False)] = False
            length, diameter = path_stats(g.subgraph(keep))
            return diameter, length

        res = _map(one, range(plan.reps), jobs)
        diams = tuple(int(d) for d, _ in res)
        lengths = tuple(float(x) for _, x in res)
        out.append(RemovalPoint(plan.mode, f, float(np.mean(diams)), float(np.mean(lengths)),
                                plan.reps, diams, lengths))
    return out


def _top(cv: CentralityVector, k: int) -> set:
    return set(cv.ranking()[:k].tolist())


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    if np.array_equal(x, y):
        return 1.0 if np.ptp(x) > 0 else None
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = float(xc @ xc), float(yc @ yc)
    if sxx == 0 or syy == 0:
        return None
    return float(np.clip((xc @ yc) / math.sqrt(sxx * syy), -1.0, 1.0))


@dataclass(frozen=True)
class Agreement:
    top1: float
    top3: float
    top10pct: float
    pearson: float | None
    top1_in_top10pct: float


def centrality_agreement(orig: CentralityVector, pert: CentralityVector) -> Agreement:
    """Rank-set overlaps and Pearson correlation between two aligned score vectors.

    Positions are compared, so both vectors must list the same nodes in the
    same order. Ties rank by ascending node id.
    """
    if not np.array_equal(orig.node_ids, pert.node_ids):
        raise ValueError("centrality vectors are not over the same node set")
    n = len(orig.values)
    if n == 0:
        raise ValueError("centrality vectors are empty")
    x = np.asarray(orig.values, dtype=np.float64)
    y = np.asarray(pert.values, dtype=np.float64)
    best = int(pert.ranking()[0])
    top1 = 1.0 if x[best] == x.max() else 0.0
    k3 = min(3, n)
    k10 = math.ceil(TOP_SHARE * n)
    top3 = len(_top(orig, k3) & _top(pert, k3)) / k3
    top10 = _top(orig, k10)
    top10pct = len(top10 & _top(pert, k10)) / k10
    return Agreement(top1, top3, top10pct, _pearson(x, y), 1.0 if best in top10 else 0.0)


@dataclass(frozen=True)
class StabilityReport:
    measure: str
    fraction: float
    top1_retention: float
    top3_overlap: float
    top10pct_overlap: float
    pearson: float | None
    reps: int
    top1_in_top10pct: float = 1.0
    samples: tuple[Agreement, ...] = field(default=(), repr=False)


def _mean_or_none(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def edge_deletion_experiment(net, levels=(0.01, 0.05, 0.10, 0.20), reps: int = 100, measures=MEASURES,
                             seed: int = 0, jobs: int = 1) -> list[StabilityReport]:
    """Centrality agreement after deleting ``ceil(f * |E|)`` random edges.

    The node set never changes. Katz keeps the attenuation chosen on the
    original graph; deletions can only lower the spectral radius, so it
    stays convergent.
    """
    g = as_digraph(net)
    if g.n_edges < 10:
        raise ValueError("edge deletion needs at least 10 edges")
    for m in measures:
        if m not in MEASURES:
            raise ValueError(f"unknown centrality measure {m!r}")
    kwargs = {}
    if "katz" in measures:
        rho = spectral_radius(g)
        kwargs["katz"] = {"attenuation": 0.85 / rho if rho > 0 else 0.85}
    base = {m: centrality(g, m, **kwargs.get(m, {})) for m in measures}
    out = []
    for li, f in enumerate(levels):
        k = math.ceil(f * g.n_edges)

        def one(rep, k=k, li=li):
            drop = _rng(seed, li, rep).choice(g.n_edges, size=k, replace=False)
            pg = g.without_edges(drop)
            return {m: centrality_agreement(base[m], centrality(pg, m, **kwargs.get(m, {}))) for m in measures}

        res = _map(one, range(reps), jobs)
        for m in measures:
            samples = tuple(r[m] for r in res)
            out.append(StabilityReport(
                m, float(f),
                float(np.mean([s.top1 for s in samples])),
                float(np.mean([s.top3 for s in samples])),
                float(np.mean([s.top10pct for s in samples])),
                _mean_or_none(s.pearson for s in samples),
                reps,
                float(np.mean([s.top1_in_top10pct for s in samples])),
                samples,
            ))
    return out


def _fmt(v) -> str:
    return "NA" if v is None else repr(float(v))


def write_removal_csv(points, path, long_path=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mode", "fraction", "mean_diameter", "mean_avg_path_length", "reps"])
        for p in points:
            w.writerow([p.mode, _fmt(p.fraction), _fmt(p.mean_diameter), _fmt(p.mean_avg_path_length), p.reps])
    if long_path is not None:
        with open(long_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mode", "fraction", "rep", "diameter", "avg_path_length"])
            for p in points:
                for rep, (d, x) in enumerate(zip(p.diameters, p.path_lengths)):
                    w.writerow([p.mode, _fmt(p.fraction), rep, d, _fmt(x)])


def write_stability_csv(reports, path, long_path=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["level", "measure", "top1", "top3", "top10pct", "pearson", "reps", "top1_in_top10pct"])
        for r in reports:
            w.writerow([_fmt(r.fraction), r.measure, _fmt(r.top1_retention), _fmt(r.top3_overlap),
                        _fmt(r.top10pct_overlap), _fmt(r.pearson), r.reps, _fmt(r.top1_in_top10pct)])
    if long_path is not None:
        with open(long_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "rep", "measure", "metric", "value"])
            for r in reports:
                for rep, s in enumerate(r.samples):
                    for metric in ("top1", "top3", "top10pct", "pearson", "top1_in_top10pct"):
                        w.writerow([_fmt(r.fraction), rep, r.measure, metric, _fmt(getattr(s, metric))])
