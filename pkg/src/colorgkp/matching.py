"""Weighted-graph machinery for decoding.

Two layers live here.  The reference operations (`shortest_paths`,
`min_weight_perfect_matching`) implement the documented contracts directly
and are what the oracle tests exercise.  `StaticGraph` / `match_defects` are
the throughput path used by the decoders: a fixed CSR sparsity pattern whose
weights are rewritten every trial, multi-source Dijkstra via scipy, and the
compiled blossom matcher from `_blossom`.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from ._blossom import max_weight_matching, min_weight_perfect_matching_dense

__all__ = [
    "WeightedGraph",
    "MatchedPair",
    "Matching",
    "StaticGraph",
    "shortest_paths",
    "min_weight_perfect_matching",
    "match_defects",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with non-negative finite edge weights.

    ``payload`` carries the originating lattice edge id (or -1).
    """

    n_nodes: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    weight: np.ndarray
    payload: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int,
                   edges: Iterable[tuple[int, int, float, int]]
                   ) -> "WeightedGraph":
        rows = list(edges)
        eu = np.array([e[0] for e in rows], np.int64)
        ev = np.array([e[1] for e in rows], np.int64)
        w = np.array([e[2] for e in rows], np.float64)
        pl = np.array([e[3] if len(e) > 3 else -1 for e in rows], np.int64)
        g = cls(n_nodes, eu, ev, w, pl)
        g.validate()
        return g

    def validate(self) -> None:
        if self.weight.size and (not np.all(np.isfinite(self.weight))
                                 or self.weight.min() < 0):
            raise ValueError("edge weights must be finite and non-negative")
        if self.edge_u.size and (min(self.edge_u.min(), self.edge_v.min()) < 0
                                 or max(self.edge_u.max(),
                                        self.edge_v.max()) >= self.n_nodes):
            raise ValueError("edge endpoint out of range")

    @property
    def n_edges(self) -> int:
        return int(self.edge_u.size)


@dataclass(frozen=True)
class MatchedPair:
    a: Hashable
    b: Hashable
    path: tuple[int, ...]
    weight: float


@dataclass
class Matching:
    pairs: list[MatchedPair] = field(default_factory=list)

    @property
    def total_weight(self) -> float:
        return float(sum(p.weight for p in self.pairs))

    def nodes(self) -> set:
        out: set = set()
        for p in self.pairs:
            out.add(p.a)
            out.add(p.b)
        return out


def shortest_paths(graph: WeightedGraph, sources: Sequence[int],
                   targets: Sequence[int] | None = None,
                   ) -> dict[tuple[int, int], tuple[float, tuple[int, ...]]]:
    """Exact single-source shortest paths from every source (Dijkstra).

    Returns {(source, target): (distance, edge-id path)}.  Unreachable
    targets get (inf, ()).  Ties are broken deterministically: on equal
    distance the predecessor edge with the lower id wins, so repeated runs
    yield identical paths.
    """
    graph.validate()
    n = graph.n_nodes
    adj: list[list[tuple[int, float, int]]] = [[] for _ in range(n)]
    for e in range(graph.n_edges):
        u = int(graph.edge_u[e])
        v = int(graph.edge_v[e])
        w = float(graph.weight[e])
        adj[u].append((v, w, e))
        adj[v].append((u, w, e))
    want = list(range(n)) if targets is None else list(targets)
    out: dict[tuple[int, int], tuple[float, tuple[int, ...]]] = {}
    for s in sources:
        dist = np.full(n, np.inf)
        pred_edge = np.full(n, -1, np.int64)
        pred_node = np.full(n, -1, np.int64)
        done = np.zeros(n, bool)
        dist[s] = 0.0
        heap: list[tuple[float, int, int]] = [(0.0, -1, s)]
        while heap:
            d, _, x = heapq.heappop(heap)
            if done[x]:
                continue
            done[x] = True
            for (y, w, e) in adj[x]:
                if done[y]:
                    continue
                nd = d + w
                if nd < dist[y] or (nd == dist[y] and pred_edge[y] != -1
                                    and e < pred_edge[y]):
                    dist[y] = nd
                    pred_edge[y] = e
                    pred_node[y] = x
                    heapq.heappush(heap, (nd, e, y))
        for t in want:
            if not np.isfinite(dist[t]):
                out[(s, t)] = (float("inf"), ())
                continue
            path: list[int] = []
            x = t
            while x != s:
                path.append(int(pred_edge[x]))
                x = int(pred_node[x])
            out[(s, t)] = (float(dist[t]), tuple(reversed(path)))
    return out


def min_weight_perfect_matching(nodes: Sequence[Hashable],
                                weight: Callable[[Hashable, Hashable], float],
                                ) -> Matching:
    """Exact minimum-weight perfect matching over ``nodes``.

    ``weight`` must be symmetric, finite and non-negative.  Raises on an odd
    node count, which signals a parity bug upstream.
    """
    nodes = list(nodes)
    n = len(nodes)
    if n % 2 != 0:
        raise ValueError(f"cannot perfectly match {n} nodes (odd parity)")
    if n == 0:
        return Matching([])
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = float(weight(nodes[i], nodes[j]))
    partner = min_weight_perfect_matching_dense(D)
    pairs = []
    for i in range(n):
        j = int(partner[i])
        if i < j:
            pairs.append(MatchedPair(nodes[i], nodes[j], (), float(D[i, j])))
    return Matching(pairs)


@njit(cache=True)
def _dijkstra_defects(indptr, indices, wdata, sources, is_target):
    """Multi-source Dijkstra, early-stopped once every target is settled.

    Returns the source-to-source distance matrix and the predecessor rows
    (valid along any shortest path to a settled node).
    """
    n = indptr.shape[0] - 1
    ns = sources.shape[0]
    dist_out = np.full((ns, ns), np.inf)
    pred = np.full((ns, n), -1, np.int64)
    cap = wdata.shape[0] + n + 2
    hk = np.empty(cap, np.float64)
    hv = np.empty(cap, np.int64)
    dist = np.empty(n, np.float64)
    done = np.empty(n, np.uint8)
    n_targets = 0
    for x in range(n):
        if is_target[x]:
            n_targets += 1
    for si in range(ns):
        s = sources[si]
        dist[:] = np.inf
        done[:] = 0
        dist[s] = 0.0
        hk[0] = 0.0
        hv[0] = s
        hn = 1
        remaining = n_targets
        while hn > 0 and remaining > 0:
            x = hv[0]
            hn -= 1
            hk[0] = hk[hn]
            hv[0] = hv[hn]
            i = 0
            while True:
                left = 2 * i + 1
                right = left + 1
                m = i
                if left < hn and hk[left] < hk[m]:
                    m = left
                if right < hn and hk[right] < hk[m]:
                    m = right
                if m == i:
                    break
                hk[i], hk[m] = hk[m], hk[i]
                hv[i], hv[m] = hv[m], hv[i]
                i = m
            if done[x]:
                continue
            done[x] = 1
            if is_target[x]:
                remaining -= 1
            d = dist[x]
            for slot in range(indptr[x], indptr[x + 1]):
                y = indices[slot]
                if done[y]:
                    continue
                nd = d + wdata[slot]
                if nd < dist[y]:
                    dist[y] = nd
                    pred[si, y] = x
                    i = hn
                    hk[i] = nd
                    hv[i] = y
                    hn += 1
                    while i > 0:
                        par = (i - 1) >> 1
                        if hk[par] <= hk[i]:
                            break
                        hk[i], hk[par] = hk[par], hk[i]
                        hv[i], hv[par] = hv[par], hv[i]
                        i = par
        for ti in range(ns):
            dist_out[si, ti] = dist[sources[ti]]
    return dist_out, pred


@njit(cache=True)
def _walk_path(pred_row, s, t, indptr, indices, slot_edge, out):
    """Recover the edge ids of the predecessor path s -> t; returns count."""
    cnt = 0
    y = t
    while y != s:
        x = pred_row[y]
        if x < 0:
            return -1
        e = -1
        for k in range(indptr[x], indptr[x + 1]):
            if indices[k] == y:
                e = slot_edge[k]
                break
        if e < 0:
            return -1
        out[cnt] = e
        cnt += 1
        y = x
    return cnt


class StaticGraph:
    """Decoding graph with a fixed sparsity pattern and per-trial weights.

    Built once per (lattice, rounds) shape; each trial only rewrites the CSR
    data array, so the scipy Dijkstra runs with zero construction overhead.
    """

    def __init__(self, n_nodes: int, edge_u: np.ndarray, edge_v: np.ndarray):
        self.n_nodes = int(n_nodes)
        self.edge_u = np.asarray(edge_u, np.int64)
        self.edge_v = np.asarray(edge_v, np.int64)
        self.n_edges = int(self.edge_u.size)
        eid = np.arange(self.n_edges)
        rows = np.concatenate([self.edge_u, self.edge_v])
        cols = np.concatenate([self.edge_v, self.edge_u])
        data = np.concatenate([eid, eid]).astype(np.float64)
        # build with edge ids as data to learn slot -> edge id, then reuse
        csr = csr_matrix((data, (rows, cols)),
                         shape=(self.n_nodes, self.n_nodes))
        if csr.nnz != 2 * self.n_edges:
            raise ValueError("parallel edges are not supported")
        self.slot_edge = csr.data.astype(np.int64).copy()
        self.indptr = csr.indptr.astype(np.int64)
        self.indices = csr.indices.astype(np.int64)
        self._csr = csr

    def distances(self, weights: np.ndarray, sources: np.ndarray,
                  ) -> tuple[np.ndarray, np.ndarray]:
        """Multi-source Dijkstra via scipy (reference / cross-check path)."""
        self._csr.data = weights[self.slot_edge]
        # both arc directions are stored explicitly, so directed=True gives
        # the undirected distances without scipy symmetrisation overhead
        return _csgraph_dijkstra(self._csr, directed=True, indices=sources,
                                 return_predecessors=True)

    def defect_distances(self, weights: np.ndarray, defects: np.ndarray,
                         ) -> tuple[np.ndarray, np.ndarray]:
        """Defect-to-defect distances and predecessor rows (compiled)."""
        is_target = np.zeros(self.n_nodes, np.uint8)
        is_target[defects] = 1
        return _dijkstra_defects(self.indptr, self.indices,
                                 weights[self.slot_edge], defects, is_target)


def match_defects(graph: StaticGraph, weights: np.ndarray,
                  defects: np.ndarray) -> tuple[np.ndarray, list, float]:
    """Pair up defect nodes on the graph with minimum total path weight.

    Returns (rho, pairs, total_weight) where rho is the mod-2 indicator over
    graph edges of all matched paths, and pairs is a list of
    (node_a, node_b, path_edge_ids) tuples.
    """
    defects = np.asarray(defects, np.int64)
    nd = defects.size
    if nd == 0:
        return np.zeros(graph.n_edges, bool), [], 0.0
    if nd % 2 != 0:
        raise ValueError(f"odd defect count {nd}: syndrome parity violated")
    D, pred = graph.defect_distances(weights, defects)
    if not np.all(np.isfinite(D)):
        raise ValueError("defect pair unreachable in decoding graph")
    partner = min_weight_perfect_matching_dense(D)
    rho = np.zeros(graph.n_edges, bool)
    pairs = []
    total = 0.0
    scratch = np.empty(graph.n_nodes, np.int64)
    for i in range(nd):
        j = int(partner[i])
        if i >= j:
            continue
        s = int(defects[i])
        t = int(defects[j])
        cnt = _walk_path(pred[i], s, t, graph.indptr,
                         graph.indices, graph.slot_edge, scratch)
        if cnt < 0:
            raise RuntimeError("path reconstruction failed")
        path = scratch[:cnt].copy()
        rho[path] ^= True
        pairs.append((s, t, path))
        total += float(D[i, j])
    return rho, pairs, total
