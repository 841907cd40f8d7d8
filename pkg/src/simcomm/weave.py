"""Weighted similarity network from out-of-fold pair likelihoods."""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .features import SECOND, PairDataset
from .graph import Graph, write_edge_list


@dataclass
class SimilarityNetwork:
    """Original topology reweighted by squared likelihoods.

    ``pairs``/``similarities`` cover every sampled pair (both orders) with
    ``s = p^2``; ``link_similarities`` is the unfloored ``s`` of each link
    of ``graph``, aligned with ``graph.edges``.
    """

    graph: Graph
    pairs: np.ndarray
    similarities: np.ndarray
    link_similarities: np.ndarray
    epsilon: float

    @property
    def pair_similarities(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(s) for (a, b), s in zip(self.pairs.tolist(), self.similarities.tolist())}

    def similarity(self, u: int, v: int) -> float:
        lo, hi = min(u, v), max(u, v)
        n1 = self.graph.node_count + 1
        keys = self.pairs[:, 0] * n1 + self.pairs[:, 1]
        i = int(np.searchsorted(keys, lo * n1 + hi))
        if i < len(keys) and keys[i] == lo * n1 + hi:
            return float(self.similarities[i])
        raise KeyError(f"pair ({lo}, {hi}) was not sampled")

    def write(self, handle: IO[str]) -> None:
        """``u v w`` lines in dataset ids, 9 significant digits."""
        write_edge_list(self.graph, handle, weighted=True)


def build_similarity_network(
    graph: Graph,
    dataset: PairDataset,
    epsilon: float = 1e-6,
    add_second_order_links: bool = False,
) -> SimilarityNetwork:
    """Install ``max(p^2, epsilon)`` as the weight of every link.

    Every link of ``graph`` must appear in ``dataset`` with an out-of-fold
    probability. Second-order pair similarities are kept for the
    similarity-gap statistics; with ``add_second_order_links`` they are
    also added as new links (this changes the topology).
    """
    if dataset.oof_probability is None:
        raise ValueError("dataset has no out-of-fold probabilities")
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must be in [0, 1]")
    prob = np.asarray(dataset.oof_probability, dtype=float)
    if np.any(np.isnan(prob)):
        raise ValueError("some samples have no out-of-fold probability")
    sims = np.clip(prob, 0.0, 1.0) ** 2

    n1 = graph.node_count + 1
    keys = dataset.pairs[:, 0] * n1 + dataset.pairs[:, 1]
    srt = np.argsort(keys, kind="stable")
    link_keys = graph.edges[:, 0] * n1 + graph.edges[:, 1]
    pos = np.searchsorted(keys[srt], link_keys)
    pos = np.minimum(pos, len(keys) - 1)
    found = keys[srt][pos] == link_keys
    if not found.all():
        u, v = graph.edges[np.argmin(found)]
        raise KeyError(f"link ({graph.node_ids[u]}, {graph.node_ids[v]}) has no likelihood")
    link_idx = srt[pos]
    link_sims = sims[link_idx]
    weights = np.maximum(link_sims, epsilon)

    net = graph.with_weights(weights)
    if add_second_order_links:
        extra = dataset.order == SECOND
        edges = np.vstack([graph.edges, dataset.pairs[extra]])
        w = np.concatenate([weights, np.maximum(sims[extra], epsilon)])
        net = Graph(graph.node_count, edges, w, graph.node_ids)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        link_sims = np.concatenate([link_sims, sims[extra]])[order]
    return SimilarityNetwork(net, dataset.pairs, sims, link_sims, epsilon)

