"""Compact directed graph in CSR form with compiled traversal kernels."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numba import njit


class DiGraph:
    """Simple directed graph: no self loops, no parallel edges.

    Nodes are positions ``0..n-1``; ``labels[i]`` carries the external node id.
    Edge order is canonical (sorted by source, then target), so two graphs
    with the same edge set have identical arrays.
    """

    def __init__(self, n: int, src=(), dst=(), labels=None):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        keep = src != dst
        key = np.unique(src[keep] * max(n, 1) + dst[keep])
        self.n_nodes = int(n)
        self.src = key // max(n, 1)
        self.dst = key % max(n, 1)
        self.labels = np.arange(n) if labels is None else np.asarray(labels)
        if len(self.labels) != n:
            raise ValueError("labels must have one entry per node")
        self.out_indptr, self.out_indices = _csr(n, self.src, self.dst)
        self.in_indptr, self.in_indices = _csr(n, self.dst, self.src)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def __repr__(self):
        return f"DiGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    @classmethod
    def from_edges(cls, edges, nodes=None) -> "DiGraph":
        """Build from (u, v) label pairs; ``nodes`` fixes label order and adds isolates."""
        edges = list(edges)
        if nodes is None:
            nodes = sorted({u for e in edges for u in e[:2]})
        labels = list(nodes)
        pos = {lab: i for i, lab in enumerate(labels)}
        src = [pos[e[0]] for e in edges]
        dst = [pos[e[1]] for e in edges]
        return cls(len(labels), src, dst, labels=np.asarray(labels))

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.n_edges, dtype=np.float64)
        return sp.csr_matrix((data, (self.src, self.dst)), shape=(self.n_nodes, self.n_nodes))

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def total_degree(self) -> np.ndarray:
        return self.in_degree() + self.out_degree()

    def subgraph(self, keep) -> "DiGraph":
        """Induced subgraph on the nodes where boolean ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        new_pos = np.cumsum(keep) - 1
        emask = keep[self.src] & keep[self.dst]
        return DiGraph(int(keep.sum()), new_pos[self.src[emask]], new_pos[self.dst[emask]], self.labels[keep])

    def without_edges(self, edge_idx) -> "DiGraph":
        """Same node set with the edges at the given canonical positions removed."""
        mask = np.ones(self.n_edges, dtype=bool)
        mask[np.asarray(edge_idx, dtype=np.int64)] = False
        return DiGraph(self.n_nodes, self.src[mask], self.dst[mask], self.labels)

    def edge_list(self) -> list[tuple]:
        return [(self.labels[u], self.labels[v]) for u, v in zip(self.src, self.dst)]


def _csr(n, a, b):
    order = np.lexsort((b, a))
    indptr = np.zeros(n + 1, dtype=np.int64)
    if a.size:
        np.add.at(indptr, a + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(b[order], dtype=np.int64)


@njit(cache=True, nogil=True)
def bfs_distance_stats(indptr, indices, n):
    """Sum, count and maximum of finite directed distances over ordered pairs s != t."""
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    total = 0
    pairs = 0
    diameter = 0
    for s in range(n):
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
                    total += du + 1
                    pairs += 1
                    if du + 1 > diameter:
                        diameter = du + 1
    return total, pairs, diameter


@njit(cache=True, nogil=True)
def brandes_betweenness(indptr, indices, n):
    """Unnormalised directed betweenness by BFS path counting and dependency back-propagation."""
    bc = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    sigma = np.empty(n, dtype=np.float64)
    delta = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = order[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    order[tail] = v
                    tail += 1
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
        # reverse BFS order: every successor x of w one level down is already final
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            for k in range(indptr[w], indptr[w + 1]):
                x = indices[k]
                if dist[x] == dist[w] + 1:
                    delta[w] += sigma[w] / sigma[x] * (1.0 + delta[x])
            bc[w] += delta[w]
    return bc
