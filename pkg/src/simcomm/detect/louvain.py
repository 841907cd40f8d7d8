from __future__ import annotations

import numpy as np

from ..graph import Graph, Partition
from ..metrics import weighted_modularity
from ._work import WorkGraph, move_nodes_modularity
from .base import DetectionResult, DetectorConfig, check_graph


def louvain(graph: Graph, config: DetectorConfig | None = None) -> DetectionResult:
    """Louvain modularity optimisation.

    Alternates shuffled greedy node moves with aggregation of communities
    into super-nodes until a pass improves modularity by less than
    ``config.tolerance``.
    """
    config = config or DetectorConfig("louvain")
    check_graph(graph)
    rng = np.random.default_rng(config.rng_seed)
    gamma = config.resolution

    wg = WorkGraph.from_graph(graph)
    membership = np.arange(graph.node_count)
    best = Partition(membership)
    trace = [weighted_modularity(graph, best, gamma)]
    passes = 0
    for _ in range(config.max_passes):
        comm = list(range(wg.n))
        moves = move_nodes_modularity(wg, comm, gamma, rng)
        passes += 1
        if moves == 0:
            break
        wg, dense = wg.aggregate(comm)
        membership = dense[membership]
        q = weighted_modularity(graph, Partition(membership), gamma)
        gain = q - trace[-1]
        if gain > 0:
            best = Partition(membership)
            trace.append(q)
        if gain < config.tolerance:
            break
    return DetectionResult(best, trace[-1], passes, trace)
