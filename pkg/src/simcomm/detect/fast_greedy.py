from __future__ import annotations

import heapq

import numpy as np

from ..graph import Graph, Partition
from ..metrics import weighted_modularity
from .base import DetectionResult, DetectorConfig, check_graph


def merge_sequence(graph: Graph, resolution: float = 1.0, stop_at_peak: bool = True):
    """Clauset-Newman-Moore agglomeration.

    Keeps ``dq[i][j]`` (modularity change of merging communities ``i`` and
    ``j``) only for adjacent community pairs and a lazy max-heap over them.
    Returns ``(merges, q0)`` where ``merges`` lists ``(kept, absorbed, dq)``
    in order and ``q0`` is the singleton modularity. With ``stop_at_peak``
    the sequence ends before the first merge that does not increase
    modularity; otherwise it runs until no adjacent pair is left.
    Ties go to the lowest ``(i, j)``.
    """
    n = graph.node_count
    m2 = 2.0 * graph.total_weight
    a = (graph.strengths() / m2).tolist()
    dq: list[dict[int, float]] = [dict() for _ in range(n)]
    for (u, v), w in zip(graph.edges.tolist(), graph.weights.tolist()):
        val = 2.0 * (w / m2 - resolution * a[u] * a[v])
        dq[u][v] = val
        dq[v][u] = val
    heap = [(-val, u, v) for u in range(n) for v, val in dq[u].items() if u < v]
    heapq.heapify(heap)
    alive = [True] * n
    q0 = -resolution * sum(x * x for x in a)
    merges: list[tuple[int, int, float]] = []
    while heap:
        neg, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or dq[i].get(j) != -neg:
            continue
        best = -neg
        if stop_at_peak and best <= 0.0:
            break
        # keep the community with more neighbours to touch fewer entries
        if len(dq[j]) > len(dq[i]):
            i, j = j, i
        merges.append((i, j, best))
        alive[j] = False
        di, dj = dq[i], dq[j]
        for k in set(di) | set(dj):
            if k == i or k == j:
                continue
            if k in di and k in dj:
                val = di[k] + dj[k]
            elif k in di:
                val = di[k] - 2.0 * resolution * a[j] * a[k]
            else:
                val = dj[k] - 2.0 * resolution * a[i] * a[k]
            di[k] = val
            dq[k][i] = val
            dq[k].pop(j, None)
            heapq.heappush(heap, (-val, min(i, k), max(i, k)))
        di.pop(j, None)
        dq[j] = {}
        a[i] += a[j]
        a[j] = 0.0
    return merges, q0


def fast_greedy(graph: Graph, config: DetectorConfig | None = None) -> DetectionResult:
    """Greedy agglomerative modularity maximisation (CNM).

    Deterministic: ``rng_seed`` is accepted for interface uniformity only.
    """
    config = config or DetectorConfig("fast_greedy")
    check_graph(graph)
    merges, q0 = merge_sequence(graph, config.resolution, stop_at_peak=True)
    parent = np.arange(graph.node_count)
    trace = [q0]
    for i, j, d in merges:
        parent[j] = i
        trace.append(trace[-1] + d)
    # resolve absorbed -> kept chains
    labels = parent.copy()
    for x in range(len(labels)):
        r = x
        while labels[r] != r:
            r = labels[r]
        labels[x] = r
    part = Partition(labels)
    q = weighted_modularity(graph, part, config.resolution)
    return DetectionResult(part, q, len(merges), trace)
