"""Node-pair samples for the same-community classifier.

First-order pairs are the links of the graph; second-order pairs are
unlinked pairs at distance exactly two. Each pair carries three structural
features computed on the unweighted topology: degree difference,
clustering-coefficient difference and common-neighbour count.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .graph import Graph, Partition

FEATURE_NAMES = ("r_deg", "r_cc", "r_cn")
FIRST, SECOND = 0, 1
ORDER_NAMES = {FIRST: "first", SECOND: "second"}


@dataclass
class SamplingConfig:
    """How pairs are drawn and which features are kept.

    ``max_second_order=None`` means the default cap of ``5 * |L|``; use
    ``max_second_order=-1`` to keep every distance-2 pair.
    ``downsample_majority`` randomly thins the larger class to the size of
    the smaller one.
    """

    include_second_order: bool = True
    max_second_order: int | None = None
    feature_mask: tuple[bool, bool, bool] = (True, True, True)
    downsample_majority: bool = False


@dataclass
class PairSample:
    u: int
    v: int
    order: str
    features: np.ndarray
    label: int
    oof_probability: float | None = None


@dataclass
class PairDataset:
    """Column-oriented pair dataset, sorted by ``(u, v)``.

    ``pairs`` is ``(P, 2)`` with ``u < v``; ``order`` holds 0 (first) or
    1 (second); ``X`` is ``(P, F)``; ``y`` the 0/1 labels.
    """

    pairs: np.ndarray
    order: np.ndarray
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    oof_probability: np.ndarray | None = field(default=None)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def class_counts(self) -> tuple[int, int]:
        n_intra = int(self.y.sum())
        return n_intra, len(self.y) - n_intra

    def sample(self, i: int) -> PairSample:
        p = None if self.oof_probability is None else float(self.oof_probability[i])
        return PairSample(
            int(self.pairs[i, 0]),
            int(self.pairs[i, 1]),
            ORDER_NAMES[int(self.order[i])],
            self.X[i].copy(),
            int(self.y[i]),
            p,
        )

    def samples(self) -> list[PairSample]:
        return [self.sample(i) for i in range(len(self))]

    def with_probabilities(self, prob: np.ndarray) -> "PairDataset":
        prob = np.asarray(prob, dtype=float)
        if prob.shape != (len(self),):
            raise ValueError("need one probability per sample")
        return PairDataset(self.pairs, self.order, self.X, self.y, self.feature_names, prob)

    def to_csv(self, handle: IO[str], graph: Graph | None = None) -> None:
        """Write ``u,v,order,r_deg,r_cc,r_cn,label`` rows.

        With ``graph`` given, node ids are written in dataset ids. Masked-out
        features are left empty.
        """
        ids = graph.node_ids if graph is not None else None
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(["u", "v", "order", *FEATURE_NAMES, "label"])
        cols = [FEATURE_NAMES.index(f) for f in self.feature_names]
        for i in range(len(self)):
            u, v = int(self.pairs[i, 0]), int(self.pairs[i, 1])
            if ids is not None:
                u, v = int(ids[u]), int(ids[v])
            feats = [""] * len(FEATURE_NAMES)
            for c, x in zip(cols, self.X[i].tolist()):
                feats[c] = repr(float(x))
            w.writerow([u, v, ORDER_NAMES[int(self.order[i])], *feats, int(self.y[i])])


def sample_pairs(
    graph: Graph,
    include_second_order: bool = True,
    max_second_order: int | None = None,
    rng_seed: int = 0,
) -> list[tuple[int, int, str]]:
    """All links as first-order pairs plus distance-2 pairs as second order.

    When more than ``max_second_order`` distance-2 pairs exist, a uniform
    random subset of that size is kept. Output is sorted by ``(u, v)``.
    """
    if graph.node_count == 0:
        raise ValueError("cannot sample pairs from an empty graph")
    pairs, order = _sample_arrays(graph, include_second_order, max_second_order, rng_seed)
    return [(int(a), int(b), ORDER_NAMES[int(o)]) for (a, b), o in zip(pairs.tolist(), order.tolist())]


def _second_order_pairs(graph: Graph) -> np.ndarray:
    nbrs, _ = graph.adjacency_lists()
    found: set[tuple[int, int]] = set()
    for u in range(graph.node_count):
        nu = graph.neighbor_set(u)
        for x in nbrs[u]:
            for v in nbrs[x]:
                if v > u and v not in nu:
                    found.add((u, v))
    return np.array(sorted(found), dtype=np.int64).reshape(-1, 2)


def _sample_arrays(graph, include_second_order, max_second_order, rng_seed):
    first = graph.edges
    if include_second_order:
        second = _second_order_pairs(graph)
        cap = 5 * graph.link_count if max_second_order is None else max_second_order
        if cap >= 0 and len(second) > cap:
            rng = np.random.default_rng(rng_seed)
            keep = np.sort(rng.choice(len(second), size=cap, replace=False))
            second = second[keep]
    else:
        second = np.zeros((0, 2), dtype=np.int64)
    pairs = np.vstack([first, second])
    order = np.concatenate([np.full(len(first), FIRST), np.full(len(second), SECOND)])
    srt = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[srt], order[srt]


def label_pairs(pairs: Sequence[tuple[int, int]] | np.ndarray, partition: Partition) -> np.ndarray:
    """1 where both endpoints share a community, else 0.

    ``pairs`` is a ``(P, 2)`` array or a sequence of ``(u, v[, order])``.
    """
    if isinstance(pairs, np.ndarray):
        p = pairs.astype(np.int64).reshape(-1, 2)
    else:
        p = np.array([(a, b) for a, b, *_ in pairs], dtype=np.int64).reshape(-1, 2)
    if len(p) and (p.min() < 0 or p.max() >= partition.node_count):
        raise IndexError("pair endpoint not covered by the partition")
    lab = partition.labels
    return (lab[p[:, 0]] == lab[p[:, 1]]).astype(np.int64)


def featurize(graph: Graph, u: int, v: int) -> np.ndarray:
    """``[|K_u - K_v|, |C_u - C_v|, |N_u & N_v|]``."""
    if u == v:
        raise ValueError("features need two distinct nodes")
    cc = graph.clustering_coefficients()
    return np.array(
        [
            abs(len(graph.neighbors(u)) - len(graph.neighbors(v))),
            abs(cc[u] - cc[v]),
            len(graph.neighbor_set(u) & graph.neighbor_set(v)),
        ],
        dtype=float,
    )


def featurize_pairs(graph: Graph, pairs: np.ndarray) -> np.ndarray:
    """Vectorised :func:`featurize` over a ``(P, 2)`` array."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise ValueError("features need two distinct nodes")
    deg = graph.degrees()
    cc = graph.clustering_coefficients()
    u, v = pairs[:, 0], pairs[:, 1]
    sets = [graph.neighbor_set(i) for i in range(graph.node_count)]
    cn = np.fromiter((len(sets[a] & sets[b]) for a, b in pairs.tolist()), dtype=float, count=len(pairs))
    return np.column_stack([np.abs(deg[u] - deg[v]).astype(float), np.abs(cc[u] - cc[v]), cn])


def build_dataset(
    graph: Graph,
    partition: Partition,
    config: SamplingConfig | None = None,
    rng_seed: int = 0,
) -> PairDataset:
    """Sample, label and featurise node pairs.

    ``graph`` must be the original (unweighted) topology; weights are never
    read.
    """
    config = config or SamplingConfig()
    if partition.node_count != graph.node_count:
        raise ValueError("partition must cover every node of the graph")
    pairs, order = _sample_arrays(graph, config.include_second_order, config.max_second_order, rng_seed)
    y = label_pairs(pairs, partition)
    if config.downsample_majority and len(y):
        rng = np.random.default_rng([rng_seed, 1])
        pos, neg = np.flatnonzero(y == 1), np.flatnonzero(y == 0)
        small, big = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
        keep = np.sort(np.concatenate([small, rng.choice(big, size=len(small), replace=False)]))
        # links are always kept: the similarity network needs a weight for each
        keep = np.union1d(keep, np.flatnonzero(order == FIRST))
        pairs, order, y = pairs[keep], order[keep], y[keep]
    X = featurize_pairs(graph, pairs)
    mask = np.asarray(config.feature_mask, dtype=bool)
    if mask.shape != (3,) or not mask.any():
        raise ValueError("feature_mask must select at least one of the three features")
    names = [n for n, m in zip(FEATURE_NAMES, mask) if m]
    return PairDataset(pairs, order, X[:, mask], y, names)
