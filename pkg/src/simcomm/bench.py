"""Growing tree-like benchmark networks with planted communities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition


@dataclass(frozen=True)
class BenchmarkParams:
    """Growth parameters.

    ``n_target`` counts nodes. Each new node brings ``m`` links; a fraction
    ``p_intra`` of them is aimed inside the node's own community.
    ``beta`` caps the probability of founding a new community, which is
    otherwise the size of the smallest community over the node count.
    """

    m: int = 1
    n_target: int = 100
    beta: float = 0.15
    p_intra: float = 0.9
    k_init: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.k_init < 3:
            raise ValueError("k_init must be at least 3")
        if self.n_target <= self.k_init:
            raise ValueError("n_target must exceed k_init")
        if not 0.0 <= self.p_intra <= 1.0:
            raise ValueError("p_intra must be in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")


def _preferential(rng: np.random.Generator, pool: list[int], degree: list[int]) -> int:
    w = np.array([degree[x] for x in pool], dtype=float)
    if w.sum() == 0:
        return pool[int(rng.integers(len(pool)))]
    return pool[int(rng.choice(len(pool), p=w / w.sum()))]


def generate(params: BenchmarkParams | None = None) -> tuple[Graph, Partition]:
    """Grow a benchmark graph and return it with its planted partition.

    Starts from a ``k_init``-clique forming community 0. Every new node
    either founds a community (probability ``min(beta, s_min / n)``) or
    joins an existing one chosen proportionally to size, then attaches
    ``m`` links to distinct existing nodes. Each link targets the node's own
    community with probability ``p_intra`` and the rest of the graph
    otherwise, choosing endpoints proportionally to degree. When the chosen
    side has no eligible node (a fresh founder has no community mates) the
    link goes to the other side, which keeps the graph connected.
    """
    params = params or BenchmarkParams()
    rng = np.random.default_rng(params.rng_seed)
    k0 = params.k_init
    comm = [0] * k0
    members: list[list[int]] = [list(range(k0))]
    degree = [k0 - 1] * k0
    edges = [(i, j) for i in range(k0) for j in range(i + 1, k0)]

    for new in range(k0, params.n_target):
        sizes = np.array([len(x) for x in members], dtype=float)
        p_found = min(params.beta, sizes.min() / new)
        if rng.random() < p_found:
            c = len(members)
            members.append([])
        else:
            c = int(rng.choice(len(members), p=sizes / sizes.sum()))
        targets: list[int] = []
        for _ in range(params.m):
            want_intra = rng.random() < params.p_intra
            inside = [x for x in members[c] if x not in targets]
            outside = [x for x in range(new) if comm[x] != c and x not in targets]
            pool = inside if want_intra else outside
            if not pool:
                pool = outside if want_intra else inside
            if not pool:
                break
            targets.append(_preferential(rng, pool, degree))
        comm.append(c)
        members[c].append(new)
        degree.append(len(targets))
        for t in targets:
            degree[t] += 1
            edges.append((t, new))

    return Graph(params.n_target, edges), Partition(np.asarray(comm))


def intra_link_fraction(graph: Graph, partition: Partition) -> float:
    e = graph.edges
    lab = partition.labels
    return float(np.mean(lab[e[:, 0]] == lab[e[:, 1]]))
