from __future__ import annotations

import numpy as np

from ..graph import Graph, Partition
from ..metrics import weighted_modularity
from ._work import WorkGraph, move_nodes_modularity, relabel_dense
from .base import DetectionResult, DetectorConfig, check_graph


def _refine(wg: WorkGraph, comm: list[int], gamma: float, rng: np.random.Generator) -> list[int]:
    """Split every community into well-connected, connected sub-communities.

    Starts from singletons. A node that is still alone and well connected to
    its community merges into the neighbouring sub-community (inside the
    same community, itself well connected) with the largest non-negative
    modularity gain. Merges only follow links, so every sub-community is
    connected.
    """
    n, m2, k = wg.n, wg.m2, wg.k
    scale = gamma / m2
    refined = list(range(n))
    tot = list(k)
    size = [1] * n
    # weight from each node (and later each sub-community) to the rest of its community
    ext = [0.0] * n
    for i in range(n):
        ci = comm[i]
        ext[i] = sum(w for j, w in zip(wg.nbrs[i], wg.wts[i]) if comm[j] == ci)
    comm_tot: dict[int, float] = {}
    for i in range(n):
        comm_tot[comm[i]] = comm_tot.get(comm[i], 0.0) + k[i]

    for v in rng.permutation(n).tolist():
        rv = refined[v]
        if size[rv] != 1:
            continue
        kc = comm_tot[comm[v]]
        kv = k[v]
        if ext[rv] < scale * kv * (kc - kv):
            continue
        cv = comm[v]
        w_to: dict[int, float] = {}
        for j, w in zip(wg.nbrs[v], wg.wts[v]):
            if comm[j] == cv:
                s = refined[j]
                w_to[s] = w_to.get(s, 0.0) + w
        best_s, best = -1, 0.0
        for s in sorted(w_to):
            if s == rv or ext[s] < scale * tot[s] * (kc - tot[s]):
                continue
            g = w_to[s] - scale * kv * tot[s]
            if g >= 0.0 and (best_s < 0 or g > best + 1e-12 * (abs(best) + kv)):
                best_s, best = s, g
        if best_s >= 0:
            ext[best_s] = ext[best_s] + ext[rv] - 2.0 * w_to[best_s]
            tot[best_s] += kv
            size[best_s] += 1
            size[rv] = 0
            refined[v] = best_s
    return refined


def split_disconnected(graph: Graph, labels: np.ndarray) -> np.ndarray:
    """Give every connected piece of a community its own label.

    Splitting a community along a cut with no links never lowers modularity.
    """
    nbrs, _ = graph.adjacency_lists()
    out = np.full(len(labels), -1, dtype=np.int64)
    nxt = 0
    for s in range(len(labels)):
        if out[s] >= 0:
            continue
        out[s] = nxt
        stack = [s]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if out[y] < 0 and labels[y] == labels[s]:
                    out[y] = nxt
                    stack.append(y)
        nxt += 1
    return out


def leiden(graph: Graph, config: DetectorConfig | None = None) -> DetectionResult:
    """Leiden: fast local moves, refinement, aggregation on the refinement.

    Every returned community induces a connected subgraph.
    """
    config = config or DetectorConfig("leiden")
    check_graph(graph)
    rng = np.random.default_rng(config.rng_seed)
    gamma = config.resolution

    wg = WorkGraph.from_graph(graph)
    membership = np.arange(graph.node_count)
    comm = list(range(wg.n))
    trace = [weighted_modularity(graph, Partition(membership), gamma)]
    passes = 0
    for _ in range(config.max_passes):
        move_nodes_modularity(wg, comm, gamma, rng, queue=True)
        passes += 1
        flat = np.asarray(comm)[membership]
        q = weighted_modularity(graph, Partition(flat), gamma)
        trace.append(q)
        if len(set(comm)) == wg.n:
            break
        refined = _refine(wg, comm, gamma, rng)
        if len(set(refined)) == wg.n:
            # aggregation would reproduce this level and local moves have converged
            break
        coarse, dense = wg.aggregate(refined)
        start = [0] * coarse.n
        for i, r in enumerate(dense.tolist()):
            start[r] = comm[i]
        comm = relabel_dense(start).tolist()
        membership = dense[membership]
        wg = coarse
    labels = split_disconnected(graph, np.asarray(comm)[membership])
    part = Partition(labels)
    q = weighted_modularity(graph, part, gamma)
    return DetectionResult(part, q, passes, trace)
