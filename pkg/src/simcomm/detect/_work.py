"""Multilevel working graph shared by the move/aggregate detectors.

Nodes of a working graph are either original nodes or aggregated
communities of a finer level. Internal weight of an aggregate is kept as a
self-loop and counts twice towards its strength, so degrees and the total
weight stay those of the original graph at every level.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from ..graph import Graph


class WorkGraph:
    def __init__(self, n: int, edges: np.ndarray, weights: np.ndarray, self_w: np.ndarray):
        self.n = n
        self.edges = edges
        self.weights = weights
        self.self_w = self_w
        nbrs: list[list[int]] = [[] for _ in range(n)]
        wts: list[list[float]] = [[] for _ in range(n)]
        for (a, b), w in zip(edges.tolist(), weights.tolist()):
            nbrs[a].append(b)
            wts[a].append(w)
            nbrs[b].append(a)
            wts[b].append(w)
        self.nbrs = nbrs
        self.wts = wts
        k = 2.0 * self_w.copy()
        np.add.at(k, edges[:, 0], weights)
        np.add.at(k, edges[:, 1], weights)
        self.k = k.tolist()
        # strength towards other nodes only
        self.out = (k - 2.0 * self_w).tolist()
        self.m2 = float(k.sum())

    @classmethod
    def from_graph(cls, graph: Graph) -> "WorkGraph":
        return cls(graph.node_count, graph.edges, np.asarray(graph.weights, dtype=float), np.zeros(graph.node_count))

    def aggregate(self, comm: list[int]) -> tuple["WorkGraph", np.ndarray]:
        """Collapse each community into one node.

        Returns the coarse graph and the dense community index of every
        node of this level.
        """
        c = np.asarray(comm, dtype=np.int64)
        uniq, dense = np.unique(c, return_inverse=True)
        nc = len(uniq)
        self_w = np.bincount(dense, weights=self.self_w, minlength=nc)
        if len(self.edges):
            a, b = dense[self.edges[:, 0]], dense[self.edges[:, 1]]
            same = a == b
            self_w += np.bincount(a[same], weights=self.weights[same], minlength=nc)
            lo, hi, w = np.minimum(a[~same], b[~same]), np.maximum(a[~same], b[~same]), self.weights[~same]
            key = lo * nc + hi
            ukey, inv = np.unique(key, return_inverse=True)
            wsum = np.bincount(inv, weights=w, minlength=len(ukey))
            edges = np.column_stack([ukey // nc, ukey % nc])
        else:
            edges, wsum = np.zeros((0, 2), dtype=np.int64), np.zeros(0)
        return WorkGraph(nc, edges, wsum, self_w), dense


def relabel_dense(comm) -> np.ndarray:
    _, dense = np.unique(np.asarray(comm, dtype=np.int64), return_inverse=True)
    return dense


def move_nodes_modularity(
    wg: WorkGraph,
    comm: list[int],
    gamma: float,
    rng: np.random.Generator,
    queue: bool = False,
) -> int:
    """Greedy local moves maximising modularity, in place on ``comm``.

    ``comm`` values must be in ``0..wg.n-1``. With ``queue=False`` nodes are
    swept in a shuffled order until a full sweep makes no move (Louvain);
    with ``queue=True`` only neighbours of moved nodes are revisited
    (Leiden's fast local move). A node may also leave for an empty
    community. Ties keep the current community, then prefer the lowest id.
    Returns the number of moves made.
    """
    n = wg.n
    m2 = wg.m2
    k = wg.k
    nbrs, wts = wg.nbrs, wg.wts
    tot = [0.0] * n
    size = [0] * n
    for i in range(n):
        tot[comm[i]] += k[i]
        size[comm[i]] += 1
    free = [c for c in range(n) if size[c] == 0]
    scale = gamma / m2
    moves = 0

    order = rng.permutation(n).tolist()
    if queue:
        pending = deque(order)
        queued = [True] * n
    while True:
        sweep_moves = 0
        it = _drain(pending, queued) if queue else order
        for i in it:
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, w in zip(nbrs[i], wts[i]):
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            size[ci] -= 1
            best_c = ci
            best = links.get(ci, 0.0) - scale * ki * tot[ci]
            eps = 1e-12 * (abs(best) + ki)
            for c in sorted(links):
                if c == ci:
                    continue
                g = links[c] - scale * ki * tot[c]
                if g > best + eps:
                    best, best_c = g, c
                    eps = 1e-12 * (abs(best) + ki)
            if size[ci] > 0 and free and 0.0 > best + eps:
                best_c = free.pop()
            if best_c != ci:
                if size[ci] == 0:
                    free.append(ci)
                comm[i] = best_c
                moves += 1
                sweep_moves += 1
                if queue:
                    for j in nbrs[i]:
                        if not queued[j] and comm[j] != best_c:
                            queued[j] = True
                            pending.append(j)
            tot[best_c] += ki
            size[best_c] += 1
        if queue or sweep_moves == 0:
            break
    return moves


def _drain(pending: deque, queued: list[bool]):
    while pending:
        i = pending.popleft()
        queued[i] = False
        yield i
