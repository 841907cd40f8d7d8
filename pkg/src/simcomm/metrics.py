"""Partition quality and agreement scores, similarity-gap statistics and
the correlation test used to relate them."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from .graph import Graph, Partition


@dataclass
class CommunityStats:
    community: int
    size: int
    q: float
    s_in: float | None = None
    s_out: float | None = None


@dataclass
class MetricReport:
    q_weighted: float
    nmi: float | None = None
    ari: float | None = None
    per_community: list[CommunityStats] = field(default_factory=list)
    s_in: float | None = None
    s_out: float | None = None
    evaluated_nodes: int | None = None

    @property
    def similarity_gap(self) -> float | None:
        if self.s_in is None or self.s_out is None:
            return None
        return self.s_in - self.s_out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["similarity_gap"] = self.similarity_gap
        return d


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int


def _check_cover(graph: Graph, partition: Partition) -> None:
    if partition.node_count != graph.node_count:
        raise ValueError(
            f"partition covers {partition.node_count} nodes, graph has {graph.node_count}"
        )


def _community_terms(graph: Graph, partition: Partition, resolution: float = 1.0):
    _check_cover(graph, partition)
    W = graph.total_weight
    if W <= 0:
        raise ValueError("modularity needs a positive total link weight")
    lab = partition.labels
    k = partition.community_count
    e, w = graph.edges, graph.weights
    same = lab[e[:, 0]] == lab[e[:, 1]]
    w_in = np.bincount(lab[e[same, 0]], weights=w[same], minlength=k)
    w_tot = np.bincount(lab, weights=graph.strengths(), minlength=k)
    return w_in / W - resolution * (w_tot / (2.0 * W)) ** 2


def weighted_modularity(graph: Graph, partition: Partition, resolution: float = 1.0) -> float:
    """``sum_i W_i^in / W - (W_i / 2W)^2`` with ``W_i = 2 W_i^in + W_i^out``."""
    return float(_community_terms(graph, partition, resolution).sum())


def modularity(graph: Graph, partition: Partition) -> float:
    """Unweighted modularity: link counts in place of weights."""
    if graph.link_count == 0:
        raise ValueError("modularity of a graph without links is undefined")
    return weighted_modularity(graph.with_weights(None), partition)


def community_modularity(graph: Graph, partition: Partition, community: int) -> float:
    """The ``community``-th summand of :func:`weighted_modularity`."""
    if not 0 <= community < partition.community_count:
        raise KeyError(f"unknown community {community}")
    return float(_community_terms(graph, partition)[community])


def per_community_modularity(graph: Graph, partition: Partition) -> np.ndarray:
    return _community_terms(graph, partition)


def _contingency(a: Partition, b: Partition) -> np.ndarray:
    if a.node_count != b.node_count:
        raise ValueError("partitions must be over the same node set")
    table = np.zeros((a.community_count, b.community_count), dtype=np.int64)
    np.add.at(table, (a.labels, b.labels), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(a: Partition, b: Partition) -> float:
    """Normalised mutual information, arithmetic-mean normalisation.

    1.0 when both partitions are a single community; 0.0 when only one is.
    """
    table = _contingency(a, b)
    n = table.sum()
    ha, hb = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))[nz] / (n * n)
    mi = float((pij * np.log(pij / outer)).sum())
    return float(min(1.0, max(0.0, 2.0 * mi / (ha + hb))))


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x * (x - 1.0) / 2.0


def ari(a: Partition, b: Partition) -> float:
    """Hubert-Arabie adjusted Rand index."""
    table = _contingency(a, b)
    n = int(table.sum())
    if n < 2:
        raise ValueError("ARI needs at least two nodes")
    sum_ij = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / _comb2(n)
    denom = 0.5 * (sum_a + sum_b) - expected
    if denom == 0.0:
        # both partitions trivial in the same way (all-in-one or all singletons)
        return 1.0 if sum_ij == expected else 0.0
    return float((sum_ij - expected) / denom)


def align_common(ids_a, a: Partition, ids_b, b: Partition) -> tuple[Partition, Partition, int]:
    """Restrict two partitions keyed by dataset ids to their shared nodes."""
    ia = {int(x): i for i, x in enumerate(ids_a)}
    ib = {int(x): i for i, x in enumerate(ids_b)}
    shared = sorted(set(ia) & set(ib))
    la = np.array([a.labels[ia[x]] for x in shared], dtype=np.int64)
    lb = np.array([b.labels[ib[x]] for x in shared], dtype=np.int64)
    return Partition(la), Partition(lb), len(shared)


@dataclass
class SimilarityGap:
    per_community: list[tuple[float, float]]
    s_in: float
    s_out: float

    @property
    def gap(self) -> float:
        return self.s_in - self.s_out


def similarity_gap(sim, partition: Partition) -> SimilarityGap:
    """Normalised average similarity of internal vs external links.

    For community ``i``, ``S_i^in`` is the summed similarity of its internal
    links divided by ``S_total * |L_i^in|`` where ``S_total`` sums the
    similarity of every sampled pair; ``S_i^out`` is the analogue over links
    leaving ``i``. A community without internal (external) links reports 0
    for that side. The global values pool all internal and all external
    links with the same normalisation.
    """
    graph: Graph = sim.graph
    _check_cover(graph, partition)
    s_total = float(np.sum(sim.similarities))
    if s_total <= 0:
        raise ValueError("total pair similarity is zero")
    lab = partition.labels
    k = partition.community_count
    e = graph.edges
    s = np.asarray(sim.link_similarities, dtype=float)
    cu, cv = lab[e[:, 0]], lab[e[:, 1]]
    same = cu == cv
    sum_in = np.bincount(cu[same], weights=s[same], minlength=k)
    cnt_in = np.bincount(cu[same], minlength=k)
    x = ~same
    sum_out = np.bincount(cu[x], weights=s[x], minlength=k) + np.bincount(cv[x], weights=s[x], minlength=k)
    cnt_out = np.bincount(cu[x], minlength=k) + np.bincount(cv[x], minlength=k)
    with np.errstate(invalid="ignore", divide="ignore"):
        s_in = np.where(cnt_in > 0, sum_in / (s_total * np.maximum(cnt_in, 1)), 0.0)
        s_out = np.where(cnt_out > 0, sum_out / (s_total * np.maximum(cnt_out, 1)), 0.0)
    n_in, n_out = int(same.sum()), int(x.sum())
    g_in = float(s[same].sum() / (s_total * n_in)) if n_in else 0.0
    g_out = float(s[x].sum() / (s_total * n_out)) if n_out else 0.0
    return SimilarityGap(list(zip(s_in.tolist(), s_out.tolist())), g_in, g_out)


def pearson_with_ttest(xs, ys) -> CorrelationResult:
    """Pearson ``r`` with a two-tailed Student-t p-value on ``n - 2`` dof."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-D and of equal length")
    n = len(x)
    if n < 3:
        raise ValueError("correlation test needs at least 3 samples")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("zero variance in one of the series")
    r = float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))
    df = n - 2
    if abs(r) == 1.0:
        return CorrelationResult(r, 0.0, n)
    t2 = r * r * df / (1.0 - r * r)
    p = float(special.betainc(0.5 * df, 0.5, df / (df + t2)))
    return CorrelationResult(r, min(1.0, max(0.0, p)), n)


def improvement_delta(best_proposed: float, best_original: float) -> float:
    """Percentage change of ``best_proposed`` over ``best_original``."""
    if best_original == 0:
        raise ZeroDivisionError("baseline value is zero")
    return 100.0 * (best_proposed - best_original) / best_original


def evaluate(graph: Graph, partition: Partition, truth: Partition | None = None, sim=None) -> MetricReport:
    """Full report for one detected partition on ``graph``.

    ``truth`` must already be aligned with ``graph``'s nodes.
    """
    terms = per_community_modularity(graph, partition)
    sizes = partition.community_sizes
    report = MetricReport(q_weighted=float(terms.sum()))
    gap = similarity_gap(sim, partition) if sim is not None else None
    for c in range(partition.community_count):
        cs = CommunityStats(c, int(sizes[c]), float(terms[c]))
        if gap is not None:
            cs.s_in, cs.s_out = gap.per_community[c]
        report.per_community.append(cs)
    if gap is not None:
        report.s_in, report.s_out = gap.s_in, gap.s_out
    if truth is not None:
        report.nmi = nmi(partition, truth)
        report.ari = ari(partition, truth)
        report.evaluated_nodes = partition.node_count
    return report
