"""Two-level Infomap: greedy minimisation of the map equation.

For an undirected graph the stationary visit rate of node ``a`` is
``p_a = s_a / 2W`` and the exit rate of module ``m`` is the weight of the
links leaving ``m`` divided by ``2W``. With ``plogp(x) = x log2 x`` the
codelength is::

    L = plogp(q) - 2 sum_m plogp(q_m) - sum_a plogp(p_a) + sum_m plogp(q_m + p_m)

which equals ``q H(Q) + sum_m (q_m + p_m) H(P_m)``: the index codebook used
at rate ``q = sum_m q_m`` plus one codebook per module, used at the rate
the walker is in or exits the module.
"""
from __future__ import annotations

import math

import numpy as np

from ..graph import Graph, Partition
from ._work import WorkGraph
from .base import DetectionResult, DetectorConfig, check_graph


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def map_equation(graph: Graph, partition: Partition) -> float:
    """Two-level codelength (bits per step) of ``partition`` on ``graph``."""
    if partition.node_count != graph.node_count:
        raise ValueError("partition must cover every node of the graph")
    W = graph.total_weight
    if W <= 0:
        raise ValueError("map equation needs a positive total link weight")
    m2 = 2.0 * W
    lab = partition.labels
    k = partition.community_count
    p = graph.strengths() / m2
    e, w = graph.edges, graph.weights
    cross = lab[e[:, 0]] != lab[e[:, 1]]
    exit_w = np.bincount(lab[e[cross, 0]], weights=w[cross], minlength=k) + np.bincount(
        lab[e[cross, 1]], weights=w[cross], minlength=k
    )
    q_m = exit_w / m2
    p_m = np.bincount(lab, weights=p, minlength=k)
    return (
        _plogp(float(q_m.sum()))
        - 2.0 * sum(_plogp(x) for x in q_m.tolist())
        - sum(_plogp(x) for x in p.tolist())
        + sum(_plogp(x) for x in (q_m + p_m).tolist())
    )


def _move_nodes(wg: WorkGraph, comm: list[int], rng: np.random.Generator) -> int:
    """Sweep nodes in shuffled order, moving each to the neighbouring (or an
    empty) module that lowers the codelength most, until a sweep makes no
    move. Works on rates normalised by the total strength."""
    n, m2 = wg.n, wg.m2
    k = [x / m2 for x in wg.k]
    out = [x / m2 for x in wg.out]
    nbrs = wg.nbrs
    wts = [[w / m2 for w in ws] for ws in wg.wts]

    exit_ = [0.0] * n
    flow = [0.0] * n
    size = [0] * n
    for i in range(n):
        c = comm[i]
        flow[c] += k[i]
        size[c] += 1
        for j, w in zip(nbrs[i], wts[i]):
            if comm[j] != c:
                exit_[c] += w
    q_tot = sum(exit_)
    free = [c for c in range(n) if size[c] == 0]
    order = rng.permutation(n).tolist()
    moves = 0
    while True:
        sweep = 0
        for i in order:
            a = comm[i]
            links: dict[int, float] = {}
            for j, w in zip(nbrs[i], wts[i]):
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            ki, oi = k[i], out[i]
            w_own = links.get(a, 0.0)
            ea_new = exit_[a] - oi + 2.0 * w_own
            fa_new = flow[a] - ki
            base_a = -2.0 * _plogp(exit_[a]) + _plogp(exit_[a] + flow[a])
            new_a = -2.0 * _plogp(ea_new) + _plogp(ea_new + fa_new)

            candidates = sorted(c for c in links if c != a)
            if size[a] > 1 and free:
                candidates.append(free[-1])
            best_c, best_d = a, 0.0
            for b in candidates:
                w_b = links.get(b, 0.0)
                eb_new = exit_[b] + oi - 2.0 * w_b
                fb_new = flow[b] + ki
                q_new = q_tot + (ea_new - exit_[a]) + (eb_new - exit_[b])
                d = (
                    _plogp(q_new)
                    - _plogp(q_tot)
                    + new_a
                    - base_a
                    - 2.0 * _plogp(eb_new)
                    + _plogp(eb_new + fb_new)
                    + 2.0 * _plogp(exit_[b])
                    - _plogp(exit_[b] + flow[b])
                )
                if d < best_d - 1e-13:
                    best_c, best_d = b, d
            if best_c == a:
                continue
            b = best_c
            if size[b] == 0:
                free.pop()
            eb_new = exit_[b] + oi - 2.0 * links.get(b, 0.0)
            q_tot += (ea_new - exit_[a]) + (eb_new - exit_[b])
            exit_[a], flow[a] = ea_new, fa_new
            exit_[b], flow[b] = eb_new, flow[b] + ki
            size[a] -= 1
            size[b] += 1
            if size[a] == 0:
                free.append(a)
                exit_[a], flow[a] = 0.0, 0.0
            comm[i] = b
            sweep += 1
            moves += 1
        if sweep == 0:
            break
    return moves


def infomap(graph: Graph, config: DetectorConfig | None = None) -> DetectionResult:
    """Two-level Infomap by repeated move/aggregate passes.

    Returns the lowest-codelength partition seen, the one-module solution
    included. ``resolution`` has no meaning for the map equation and is
    ignored. No teleportation: flow on each connected component is the
    undirected stationary distribution.
    """
    config = config or DetectorConfig("infomap")
    check_graph(graph)
    rng = np.random.default_rng(config.rng_seed)

    one = Partition(np.zeros(graph.node_count, dtype=np.int64))
    best = Partition.singletons(graph.node_count)
    trace = [map_equation(graph, best)]
    one_module = map_equation(graph, one)
    if one_module < trace[0]:
        best = one
        trace[0] = one_module

    wg = WorkGraph.from_graph(graph)
    membership = np.arange(graph.node_count)
    passes = 0
    for _ in range(config.max_passes):
        comm = list(range(wg.n))
        moves = _move_nodes(wg, comm, rng)
        passes += 1
        if moves == 0:
            break
        wg, dense = wg.aggregate(comm)
        membership = dense[membership]
        cand = Partition(membership)
        length = map_equation(graph, cand)
        gain = trace[-1] - length
        if gain > 0:
            best = cand
            trace.append(length)
        if gain < config.tolerance:
            break
    return DetectionResult(best, trace[-1], passes, trace)
