"""Structural measures and centralities for directed legislation networks.

Every function accepts a :class:`~leginet.graph.DiGraph` or anything with a
``to_digraph()`` method (a LegislationNetwork or Snapshot). Typed parallel
edges collapse to one arc for path, clustering and centrality computations;
``average_degree`` keeps the caller's own edge count.
"""

from __future__ import annotations

import csv
import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ConvergenceError
from .graph import DiGraph, bfs_distance_stats, brandes_betweenness

MEASURES = ("katz", "betweenness", "in_degree")

# prepositions, conjunctions and articles that say nothing about a title's subject
STOPWORDS = frozenset(
    """a an the and or nor but of to in on for by with at from as into upon under
    over between within without against about after before during through""".split()
)

_YEAR = re.compile(r"^\d{4}$")


def as_digraph(net) -> DiGraph:
    return net if isinstance(net, DiGraph) else net.to_digraph()


@dataclass(frozen=True)
class CentralityVector:
    measure: str
    node_ids: np.ndarray
    values: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def scores(self) -> dict:
        return {k.item() if hasattr(k, "item") else k: float(v) for k, v in zip(self.node_ids, self.values)}

    def ranking(self) -> np.ndarray:
        """Positions sorted by descending score, ties by ascending node id."""
        return np.lexsort((self.node_ids, -self.values))

    def top(self, k: int) -> list:
        return [self.node_ids[i] for i in self.ranking()[:k]]


def average_degree(net) -> float:
    """Edges per node, 0 for an empty graph."""
    n = net.n_nodes
    return net.n_edges / n if n else 0.0


def directed_clustering(net) -> float:
    """Mean local clustering over all directed triangle motifs.

    For node i with total degree d and b reciprocated neighbours the local
    coefficient is ((A+A^T)^3)_ii / (2 (d(d-1) - 2b)); nodes where that
    denominator vanishes count as 0.
    """
    g = as_digraph(net)
    if g.n_nodes == 0:
        return 0.0
    a = g.adjacency()
    s = (a + a.T).tocsr()
    closed = np.asarray((s @ s).multiply(s).sum(axis=1)).ravel()
    d = g.total_degree().astype(np.float64)
    recip = np.asarray(a.multiply(a.T).sum(axis=1)).ravel()
    denom = 2.0 * (d * (d - 1.0) - 2.0 * recip)
    local = np.divide(closed, denom, out=np.zeros_like(closed, dtype=np.float64), where=denom > 0)
    return float(local.mean())


def path_stats(net) -> tuple[float, int]:
    """Average length and maximum over all reachable ordered pairs; (0, 0) if none."""
    g = as_digraph(net)
    total, pairs, diameter = bfs_distance_stats(g.out_indptr, g.out_indices, g.n_nodes)
    if pairs == 0:
        return 0.0, 0
    return total / pairs, int(diameter)


def _is_acyclic(g: DiGraph) -> bool:
    indeg = g.in_degree().copy()
    stack = list(np.flatnonzero(indeg == 0))
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for v in g.out_indices[g.out_indptr[u] : g.out_indptr[u + 1]]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return seen == g.n_nodes


def spectral_radius(net, n_iter: int = 300) -> float:
    """Power-iteration estimate of the adjacency spectral radius.

    Acyclic graphs have a nilpotent adjacency matrix and return 0 exactly.
    Otherwise the estimate is the mean growth rate of ``A^k 1`` over the last
    half of the iterations.
    """
    g = as_digraph(net)
    if g.n_edges == 0 or _is_acyclic(g):
        return 0.0
    a = g.adjacency()
    v = np.ones(g.n_nodes)
    logs = []
    for _ in range(n_iter):
        w = a @ v
        norm = w.sum()
        if norm == 0:
            return 0.0
        logs.append(math.log(norm / v.sum()))
        v = w / norm
    tail = logs[len(logs) // 2 :]
    return float(math.exp(sum(tail) / len(tail)))


def katz_prestige(net, attenuation: float | None = None, tol: float = 1e-10, max_iter: int = 10_000) -> CentralityVector:
    """Katz prestige: fixed point of x = attenuation * A^T x + 1.

    A node's score accumulates attenuated scores of the nodes citing it. When
    ``attenuation`` is omitted it is 0.85 divided by the spectral radius
    (0.85 itself on acyclic graphs, where every attenuation converges).
    """
    g = as_digraph(net)
    rho = None
    if attenuation is None:
        rho = spectral_radius(g)
        attenuation = 0.85 / rho if rho > 0 else 0.85
    at = g.adjacency().T.tocsr()
    x = np.ones(g.n_nodes)
    for _ in range(max_iter):
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = attenuation * (at @ x) + 1.0
        if not np.all(np.isfinite(nxt)):
            break
        diff = np.max(np.abs(nxt - x)) if g.n_nodes else 0.0
        x = nxt
        if diff <= tol * max(1.0, float(np.max(x)) if g.n_nodes else 1.0):
            return CentralityVector("katz", g.labels, x, {"attenuation": attenuation, "spectral_radius": rho})
    raise ConvergenceError(f"Katz iteration did not converge with attenuation={attenuation}")


def betweenness(net) -> CentralityVector:
    g = as_digraph(net)
    return CentralityVector("betweenness", g.labels, brandes_betweenness(g.out_indptr, g.out_indices, g.n_nodes))


def in_degree_centrality(net) -> CentralityVector:
    g = as_digraph(net)
    return CentralityVector("in_degree", g.labels, g.in_degree().astype(np.float64))


def centrality(net, measure: str, **kwargs) -> CentralityVector:
    if measure == "katz":
        return katz_prestige(net, **kwargs)
    if measure == "betweenness":
        return betweenness(net)
    if measure == "in_degree":
        return in_degree_centrality(net)
    raise ValueError(f"unknown centrality measure {measure!r}")


def random_digraph(n: int, m: int, rng: np.random.Generator, labels=None) -> DiGraph:
    """Uniform simple directed graph with exactly n nodes and m arcs."""
    if m > n * (n - 1):
        raise ValueError(f"cannot place {m} arcs on {n} nodes")
    idx = rng.choice(n * (n - 1), size=m, replace=False) if m else np.zeros(0, dtype=np.int64)
    src = idx // max(n - 1, 1)
    r = idx % max(n - 1, 1)
    dst = r + (r >= src)
    return DiGraph(n, src, dst, labels)


def small_world_sigma(net, n_random: int = 50, seed: int | None = 0) -> float:
    """Clustering and path length relative to random graphs of equal size and density.

    sigma = (C / C_rand) / (L / L_rand), with C_rand and L_rand averaged over
    ``n_random`` uniform random digraphs. If the random graphs never close a
    triangle their clustering is replaced by the arc density.
    """
    g = as_digraph(net)
    if g.n_edges == 0:
        raise ValueError("small-world sigma needs at least one edge")
    c = directed_clustering(g)
    length, _ = path_stats(g)
    rng = np.random.default_rng(seed)
    cs, ls = [], []
    for _ in range(n_random):
        r = random_digraph(g.n_nodes, g.n_edges, rng)
        cs.append(directed_clustering(r))
        ls.append(path_stats(r)[0])
    c_rand = float(np.mean(cs))
    l_rand = float(np.mean(ls))
    if c_rand == 0:
        c_rand = g.n_edges / (g.n_nodes * (g.n_nodes - 1))
    if length == 0 or l_rand == 0:
        return float("nan")
    return (c / c_rand) / (length / l_rand)


def frequent_terms(net, cent: CentralityVector, top_k: int = 20, stopwords=STOPWORDS) -> list[tuple[str, int]]:
    """Word counts over the titles of the ``top_k`` most central nodes.

    Stopwords, the word "act" and 4-digit years are dropped. Sorted by
    descending count, then alphabetically.
    """
    titles = net.titles() if hasattr(net, "titles") else {k: str(k) for k in cent.node_ids}
    counts: Counter = Counter()
    for node in cent.top(top_k):
        key = node.item() if hasattr(node, "item") else node
        for tok in titles[key].split():
            if tok in stopwords or tok == "act" or _YEAR.match(tok):
                continue
            counts[tok] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass
class SnapshotMetrics:
    end_year: int
    n_nodes: int
    n_edges: int
    avg_degree: float
    avg_path_length: float
    directed_cc: float
    diameter: int
    sigma: float | None


@dataclass
class MetricsReport:
    n_nodes: int
    n_edges: int
    avg_degree: float
    avg_path_length: float
    directed_cc: float
    diameter: int
    sigma: float | None
    snapshots: list[SnapshotMetrics] = field(default_factory=list)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["end_year", "nodes", "edges", "average_degree", "average_path_length",
                        "directed_cc", "diameter", "small_world_sigma"])
            for r in self.snapshots:
                sigma = "NA" if r.sigma is None or math.isnan(r.sigma) else f"{r.sigma:.3f}"
                w.writerow([r.end_year, r.n_nodes, r.n_edges, f"{r.avg_degree:.3f}", f"{r.avg_path_length:.3f}",
                            f"{r.directed_cc:.3f}", r.diameter, sigma])


def _measure(net, n_random, seed):
    g = as_digraph(net)
    length, diameter = path_stats(g)
    sigma = small_world_sigma(g, n_random, seed) if g.n_edges and n_random else None
    return average_degree(net), length, directed_clustering(g), diameter, sigma


def metrics_report(net, snapshot_years=(), n_random: int = 50, seed: int | None = 0) -> MetricsReport:
    """Whole-network measures plus one row per cumulative snapshot."""
    deg, length, cc, diameter, sigma = _measure(net, n_random, seed)
    report = MetricsReport(net.n_nodes, net.n_edges, deg, length, cc, diameter, sigma)
    for year in snapshot_years:
        snap = net.snapshot(year)
        deg, length, cc, diameter, sigma = _measure(snap, n_random, seed)
        report.snapshots.append(SnapshotMetrics(year, snap.n_nodes, snap.n_edges, deg, length, cc, diameter, sigma))
    return report
