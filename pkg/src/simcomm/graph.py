"""Undirected simple graphs, crisp partitions, dataset ingestion and the
local structural primitives (degree, strength, clustering, common neighbours).

Node ids inside a :class:`Graph` are always dense ``0..n-1``; the original
dataset ids are kept in ``Graph.node_ids`` so results can be written back in
the dataset's own numbering.
"""
from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

import numpy as np


class ParseError(ValueError):
    """Malformed line in an edge list or community file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class Graph:
    """Immutable undirected simple graph with non-negative link weights.

    Parameters
    ----------
    node_count : int
        Number of nodes; ids are ``0..node_count-1``.
    edges : array-like of shape (m, 2)
        Links as node pairs. Order within a pair is irrelevant.
    weights : array-like of shape (m,), optional
        Link weights, default 1.0 each.
    node_ids : array-like of shape (n,), optional
        Original dataset id of every dense node id.

    Duplicate pairs and self-loops are rejected here; ingestion functions
    are responsible for cleaning raw input first.
    """

    def __init__(self, node_count: int, edges, weights=None, node_ids=None):
        n = int(node_count)
        if n < 0:
            raise ValueError("node_count must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        w = np.ones(len(e)) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if len(w) != len(e):
            raise ValueError("weights and edges differ in length")
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")

        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if dup.any():
                raise ValueError("duplicate links are not allowed")

        self._n = n
        self._edges = np.column_stack([lo, hi])
        self._weights = w
        self._edges.setflags(write=False)
        self._weights.setflags(write=False)
        if node_ids is None:
            self._node_ids = np.arange(n, dtype=np.int64)
        else:
            self._node_ids = np.asarray(node_ids, dtype=np.int64)
            if len(self._node_ids) != n:
                raise ValueError("node_ids must have one entry per node")
        self._node_ids.setflags(write=False)

        nbrs: list[list[int]] = [[] for _ in range(n)]
        wts: list[list[float]] = [[] for _ in range(n)]
        for (a, b), x in zip(self._edges.tolist(), self._weights.tolist()):
            nbrs[a].append(b)
            wts[a].append(x)
            nbrs[b].append(a)
            wts[b].append(x)
        for i in range(n):
            if len(nbrs[i]) > 1:
                srt = sorted(zip(nbrs[i], wts[i]))
                nbrs[i] = [a for a, _ in srt]
                wts[i] = [x for _, x in srt]
        self._nbrs = nbrs
        self._wts = wts
        self._nbr_sets: list[frozenset[int]] | None = None
        self._clustering: np.ndarray | None = None

    # -- basic views -------------------------------------------------------
    @property
    def node_count(self) -> int:
        return self._n

    @property
    def link_count(self) -> int:
        return len(self._edges)

    @property
    def total_weight(self) -> float:
        return float(self._weights.sum())

    @property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of links with ``u < v``, sorted lexicographically."""
        return self._edges

    @property
    def weights(self) -> np.ndarray:
        """Link weights aligned with :attr:`edges`."""
        return self._weights

    @property
    def node_ids(self) -> np.ndarray:
        return self._node_ids

    @property
    def is_weighted(self) -> bool:
        return bool(np.any(self._weights != 1.0))

    def neighbors(self, node: int) -> list[int]:
        self._check(node)
        return self._nbrs[node]

    def neighbor_weights(self, node: int) -> list[float]:
        self._check(node)
        return self._wts[node]

    def adjacency_lists(self) -> tuple[list[list[int]], list[list[float]]]:
        """Sorted neighbour lists and matching weight lists for every node."""
        return self._nbrs, self._wts

    def neighbor_set(self, node: int) -> frozenset[int]:
        self._check(node)
        if self._nbr_sets is None:
            self._nbr_sets = [frozenset(a) for a in self._nbrs]
        return self._nbr_sets[node]

    def has_link(self, u: int, v: int) -> bool:
        return v in self.neighbor_set(u)

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._nbrs], dtype=np.int64)

    def strengths(self) -> np.ndarray:
        s = np.zeros(self._n)
        np.add.at(s, self._edges[:, 0], self._weights)
        np.add.at(s, self._edges[:, 1], self._weights)
        return s

    def clustering_coefficients(self) -> np.ndarray:
        if self._clustering is None:
            cc = np.zeros(self._n)
            for i in range(self._n):
                k = len(self._nbrs[i])
                if k < 2:
                    continue
                ni = self.neighbor_set(i)
                # each triangle is seen twice, once from each other corner
                t2 = sum(len(ni & self.neighbor_set(j)) for j in self._nbrs[i])
                cc[i] = t2 / (k * (k - 1))
            cc.setflags(write=False)
            self._clustering = cc
        return self._clustering

    def with_weights(self, weights) -> "Graph":
        """Same topology and id map, new weights aligned with :attr:`edges`."""
        return Graph(self._n, self._edges, weights, self._node_ids)

    def link_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self._edges}

    def _check(self, node: int) -> None:
        if not 0 <= node < self._n:
            raise IndexError(f"unknown node id {node}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._edges, other._edges)
            and np.array_equal(self._weights, other._weights)
            and np.array_equal(self._node_ids, other._node_ids)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(nodes={self._n}, links={self.link_count}, total_weight={self.total_weight:g})"


@dataclass(frozen=True)
class Partition:
    """Crisp partition: ``labels[i]`` is the community of node ``i``.

    Labels are canonicalised to ``0..k-1`` in order of first appearance, so
    two partitions that differ only by community naming compare equal.
    """

    labels: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.labels).reshape(-1)
        if raw.size and raw.min() < 0:
            raise ValueError("community labels must be non-negative")
        _, first, inv = np.unique(raw, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        canon = rank[inv].astype(np.int64)
        canon.setflags(write=False)
        object.__setattr__(self, "labels", canon)

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def community_count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @property
    def community_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.community_count)

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.community_count)]
        for node, c in enumerate(self.labels.tolist()):
            groups[c].append(node)
        return groups

    @classmethod
    def from_communities(cls, groups: Iterable[Iterable[int]], node_count: int) -> "Partition":
        labels = np.full(node_count, -1, dtype=np.int64)
        for c, members in enumerate(groups):
            for v in members:
                if labels[v] != -1:
                    raise ValueError(f"node {v} appears in more than one community")
                labels[v] = c
        if np.any(labels < 0):
            raise ValueError("communities do not cover every node")
        return cls(labels)

    @classmethod
    def singletons(cls, node_count: int) -> "Partition":
        return cls(np.arange(node_count))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None  # type: ignore[assignment]


@dataclass
class OverlappingAssignment:
    """Raw community memberships keyed by original dataset node id."""

    memberships: dict[int, set[int]] = field(default_factory=dict)

    def communities_of(self, node: int) -> set[int]:
        return self.memberships.get(node, set())

    def community_members(self) -> dict[int, set[int]]:
        members: dict[int, set[int]] = {}
        for node, comms in self.memberships.items():
            for c in comms:
                members.setdefault(c, set()).add(node)
        return members


@dataclass
class Deoverlapped:
    """Crisp assignment in dataset ids plus the nodes that were discarded."""

    assignment: dict[int, int]
    dropped: set[int]

    def partition_for(self, graph: Graph) -> Partition:
        """Partition aligned to ``graph``'s dense ids (via ``graph.node_ids``)."""
        try:
            labels = [self.assignment[int(i)] for i in graph.node_ids]
        except KeyError as exc:
            raise KeyError(f"graph node {exc.args[0]} has no community") from None
        return Partition(np.asarray(labels, dtype=np.int64))


# -- ingestion -------------------------------------------------------------

def _open_text(source) -> IO[str]:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
        if data[:2] == b"\x1f\x8b":
            data = gzip.decompress(data)
        return io.StringIO(data.decode("utf-8"))
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rt", encoding="utf-8")
        return open(path, encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    # binary file object
    return io.TextIOWrapper(source, encoding="utf-8")


def _int_rows(source) -> Iterable[tuple[int, list[int]]]:
    handle = _open_text(source)
    try:
        for lineno, line in enumerate(handle, start=1):
            s = line.strip()
            if not s or s.startswith("#") or s.startswith("%"):
                continue
            try:
                yield lineno, [int(tok) for tok in s.split()]
            except ValueError:
                raise ParseError(f"non-integer token in {s!r}", lineno) from None
    finally:
        if not isinstance(source, io.TextIOBase):
            handle.close()


def load_edge_list(source, directed_input: bool = False) -> Graph:
    """Read a SNAP-style edge list into a simple undirected :class:`Graph`.

    Each non-comment line holds two integer node ids separated by spaces or
    tabs (extra columns are rejected). Reversed and repeated pairs collapse
    into one link of weight 1.0 and self-loops are dropped. With
    ``directed_input`` the pairs are read as arcs; the result is the same
    symmetrised graph, the flag only documents the source convention.

    ``source`` may be a path, raw bytes or an open file object. Gzipped
    files are handled transparently.
    """
    del directed_input  # arcs and edges collapse identically
    pairs: set[tuple[int, int]] = set()
    seen: dict[int, None] = {}
    for lineno, row in _int_rows(source):
        if len(row) != 2:
            raise ParseError(f"expected 2 node ids, got {len(row)}", lineno)
        u, v = row
        seen.setdefault(u)
        seen.setdefault(v)
        if u != v:
            pairs.add((u, v) if u < v else (v, u))
    if not seen:
        raise ValueError("edge list is empty")
    # nodes that only occur in self-loops still exist as isolated nodes
    ids = np.array(sorted(seen), dtype=np.int64)
    index = {int(x): i for i, x in enumerate(ids)}
    edges = np.array([(index[u], index[v]) for u, v in sorted(pairs)], dtype=np.int64).reshape(-1, 2)
    return Graph(len(ids), edges, node_ids=ids)


def load_communities(source, format: str = "node-label-pairs") -> OverlappingAssignment:
    """Read ground-truth communities.

    ``format`` is ``"node-label-pairs"`` (``node community`` per line, as in
    the email-Eu-core department file) or ``"one-community-per-line"`` (SNAP
    ``*.cmty`` files, community ids assigned by line order from 0).
    """
    if format not in ("node-label-pairs", "one-community-per-line"):
        raise ValueError(f"unknown community format {format!r}")
    memberships: dict[int, set[int]] = {}
    cid = 0
    for lineno, row in _int_rows(source):
        if format == "node-label-pairs":
            if len(row) != 2:
                raise ParseError(f"expected 'node community', got {len(row)} tokens", lineno)
            memberships.setdefault(row[0], set()).add(row[1])
        else:
            for node in row:
                memberships.setdefault(node, set()).add(cid)
            cid += 1
    return OverlappingAssignment(memberships)


def deoverlap(raw: OverlappingAssignment, rng_seed: int = 0) -> Deoverlapped:
    """Turn overlapping memberships into a crisp assignment.

    Each node goes to its largest community, sizes taken from the raw
    membership counts; ties are broken uniformly at random. Communities left
    with a single member after reassignment are removed (once, not
    iterated) and their nodes dropped, as are nodes with no membership.
    """
    rng = np.random.default_rng(rng_seed)
    sizes = {c: len(m) for c, m in raw.community_members().items()}
    assignment: dict[int, int] = {}
    dropped: set[int] = set()
    for node in sorted(raw.memberships):
        comms = sorted(raw.memberships[node])
        if not comms:
            dropped.add(node)
            continue
        best = max(sizes[c] for c in comms)
        tied = [c for c in comms if sizes[c] == best]
        assignment[node] = tied[0] if len(tied) == 1 else tied[int(rng.integers(len(tied)))]
    counts: dict[int, int] = {}
    for c in assignment.values():
        counts[c] = counts.get(c, 0) + 1
    for node in [v for v, c in assignment.items() if counts[c] == 1]:
        del assignment[node]
        dropped.add(node)
    return Deoverlapped(assignment, dropped)


def prune_links(graph: Graph, deoverlapped: Deoverlapped) -> Graph:
    """Keep only links whose endpoints both survived :func:`deoverlap`.

    Nodes without any remaining link are removed and ids re-densified; the
    returned graph's ``node_ids`` still refer to dataset ids. Nodes absent
    from the community file count as dropped.
    """
    ids = graph.node_ids
    keep = np.array([int(i) in deoverlapped.assignment for i in ids], dtype=bool)
    e = graph.edges
    mask = keep[e[:, 0]] & keep[e[:, 1]]
    if mask.all() and keep.all():
        return graph
    e, w = e[mask], graph.weights[mask]
    used = np.unique(e)
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return Graph(len(used), remap[e], w, ids[used])


def induced_subgraph(graph: Graph, nodes: Iterable[int]) -> Graph:
    """Subgraph on ``nodes`` (dense ids), re-densified in ascending id order."""
    sel = np.zeros(graph.node_count, dtype=bool)
    sel[list(nodes)] = True
    e = graph.edges
    mask = sel[e[:, 0]] & sel[e[:, 1]]
    kept = np.flatnonzero(sel)
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[kept] = np.arange(len(kept))
    return Graph(len(kept), remap[e[mask]], graph.weights[mask], graph.node_ids[kept])


# -- local structure ---------------------------------------------------------

def degree(graph: Graph, node: int) -> int:
    """Number of neighbours of ``node`` (weights ignored)."""
    return len(graph.neighbors(node))


def strength(graph: Graph, node: int) -> float:
    """Sum of the weights of the links incident to ``node``."""
    return float(sum(graph.neighbor_weights(node)))


def clustering_coefficient(graph: Graph, node: int) -> float:
    """``2 T / (K (K - 1))``; 0 for nodes of degree 0 or 1."""
    graph._check(node)
    return float(graph.clustering_coefficients()[node])


def common_neighbor_count(graph: Graph, u: int, v: int) -> int:
    if u == v:
        raise ValueError("common neighbours need two distinct nodes")
    return len(graph.neighbor_set(u) & graph.neighbor_set(v))


def average_clustering(graph: Graph) -> float:
    if graph.node_count == 0:
        raise ValueError("average clustering of an empty graph is undefined")
    return float(graph.clustering_coefficients().mean())


def is_connected_subset(graph: Graph, nodes: Iterable[int]) -> bool:
    """True when ``nodes`` induce a connected subgraph (BFS)."""
    members = set(nodes)
    if not members:
        return True
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in graph.neighbors(x):
            if y in members and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(members)


# -- output ------------------------------------------------------------------

def write_edge_list(graph: Graph, handle: IO[str], weighted: bool | None = None) -> None:
    """Write ``u v`` (or ``u v w``) lines in dataset ids.

    Weights are printed with 9 significant digits.
    """
    if weighted is None:
        weighted = graph.is_weighted
    ids = graph.node_ids
    for (a, b), w in zip(graph.edges.tolist(), graph.weights.tolist()):
        if weighted:
            handle.write(f"{ids[a]} {ids[b]} {w:.9g}\n")
        else:
            handle.write(f"{ids[a]} {ids[b]}\n")


def read_weighted_edge_list(source) -> Graph:
    """Inverse of :func:`write_edge_list` with weights (``u v w`` lines)."""
    handle = _open_text(source)
    rows: dict[tuple[int, int], float] = {}
    seen: dict[int, None] = {}
    try:
        for lineno, line in enumerate(handle, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tok = s.split()
            if len(tok) not in (2, 3):
                raise ParseError("expected 'u v [w]'", lineno)
            try:
                u, v = int(tok[0]), int(tok[1])
                w = float(tok[2]) if len(tok) == 3 else 1.0
            except ValueError:
                raise ParseError(f"bad token in {s!r}", lineno) from None
            seen.setdefault(u)
            seen.setdefault(v)
            if u != v:
                rows[(min(u, v), max(u, v))] = w
    finally:
        if not isinstance(source, io.TextIOBase):
            handle.close()
    if not seen:
        raise ValueError("edge list is empty")
    ids = np.array(sorted(seen), dtype=np.int64)
    index = {int(x): i for i, x in enumerate(ids)}
    keys = sorted(rows)
    edges = np.array([(index[u], index[v]) for u, v in keys], dtype=np.int64).reshape(-1, 2)
    return Graph(len(ids), edges, [rows[k] for k in keys], ids)


def write_partition(graph: Graph, partition: Partition, handle: IO[str]) -> None:
    """``node community`` lines in dataset ids."""
    for node, c in zip(graph.node_ids.tolist(), partition.labels.tolist()):
        handle.write(f"{node} {c}\n")


def partition_to_json(graph: Graph, partition: Partition) -> dict:
    return {
        "community_count": partition.community_count,
        "assignment": {str(n): int(c) for n, c in zip(graph.node_ids.tolist(), partition.labels.tolist())},
    }


def read_partition(source, graph: Graph | None = None) -> tuple[np.ndarray, Partition]:
    """Read ``node community`` lines.

    Returns the dataset ids (sorted) and the partition over them. With
    ``graph`` given, the result is aligned to the graph's dense ids and
    every graph node must be present.
    """
    raw = load_communities(source, "node-label-pairs")
    for node, comms in raw.memberships.items():
        if len(comms) != 1:
            raise ValueError(f"node {node} has {len(comms)} communities in a crisp partition file")
    lookup: Mapping[int, int] = {n: next(iter(c)) for n, c in raw.memberships.items()}
    if graph is not None:
        ids = graph.node_ids
        missing = [int(i) for i in ids if int(i) not in lookup]
        if missing:
            raise KeyError(f"{len(missing)} graph nodes missing from partition file, e.g. {missing[0]}")
        return ids, Partition(np.array([lookup[int(i)] for i in ids], dtype=np.int64))
    ids = np.array(sorted(lookup), dtype=np.int64)
    return ids, Partition(np.array([lookup[int(i)] for i in ids], dtype=np.int64))
