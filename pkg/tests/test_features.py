import io
import itertools

import numpy as np
import pytest

from simcomm.features import (
    FIRST,
    SECOND,
    SamplingConfig,
    build_dataset,
    featurize,
    featurize_pairs,
    label_pairs,
    sample_pairs,
)
from simcomm.graph import Graph, Partition, load_edge_list

from conftest import random_graph


def brute_distance_two(g: Graph) -> set:
    n = g.node_count
    adj = np.zeros((n, n), dtype=int)
    for u, v in g.edges.tolist():
        adj[u, v] = adj[v, u] = 1
    two = adj @ adj
    return {(u, v) for u, v in itertools.combinations(range(n), 2) if not adj[u, v] and two[u, v] > 0}


def test_triangle_and_star():
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    pairs = sample_pairs(tri)
    assert [o for *_, o in pairs] == ["first"] * 3
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    pairs = sample_pairs(star)
    assert sum(o == "first" for *_, o in pairs) == 3
    assert {(u, v) for u, v, o in pairs if o == "second"} == {(1, 2), (1, 3), (2, 3)}


def test_second_order_matches_matrix_square(rng):
    for _ in range(20):
        g = random_graph(rng, 15, 0.2)
        if g.link_count == 0:
            continue
        pairs = sample_pairs(g, max_second_order=-1)
        got = {(u, v) for u, v, o in pairs if o == "second"}
        assert got == brute_distance_two(g)
        assert {(u, v) for u, v, o in pairs if o == "first"} == set(map(tuple, g.edges.tolist()))
        assert pairs == sorted(pairs)


def test_second_order_cap_is_seeded_subsample(rng):
    g = random_graph(rng, 30, 0.15)
    full = {(u, v) for u, v, o in sample_pairs(g, max_second_order=-1) if o == "second"}
    a = sample_pairs(g, max_second_order=10, rng_seed=4)
    sub = {(u, v) for u, v, o in a if o == "second"}
    assert len(sub) == 10 and sub <= full
    assert a == sample_pairs(g, max_second_order=10, rng_seed=4)
    default = sample_pairs(g)
    assert sum(o == "second" for *_, o in default) == min(len(full), 5 * g.link_count)


def test_features_by_hand():
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert featurize(tri, 0, 1).tolist() == [0.0, 0.0, 1.0]
    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert featurize(star, 0, 1).tolist() == [3.0, 0.0, 0.0]
    # 4-clique minus link (2, 3): nodes 0, 1 have degree 3, C = 2/3
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert featurize(g, 0, 1) == pytest.approx([0.0, 0.0, 2.0])
    # node 2: degree 2, C = 1
    assert featurize(g, 0, 2) == pytest.approx([1.0, 1.0 / 3.0, 1.0])
    assert featurize(g, 2, 3) == pytest.approx([0.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        featurize(g, 1, 1)


def test_vectorised_features_agree(rng):
    g = random_graph(rng, 20, 0.25)
    pairs = np.array([(u, v) for u, v, _ in sample_pairs(g)])
    X = featurize_pairs(g, pairs)
    for row, (u, v) in zip(X, pairs.tolist()):
        assert row.tolist() == pytest.approx(featurize(g, u, v).tolist())
        assert featurize(g, v, u).tolist() == pytest.approx(row.tolist())


def test_labels():
    p = Partition(np.array([0, 0, 1]))
    assert label_pairs([(0, 1, "first"), (1, 2, "first")], p).tolist() == [1, 0]
    assert label_pairs(np.array([[0, 2]]), Partition(np.zeros(3, dtype=int))).tolist() == [1]
    with pytest.raises(IndexError):
        label_pairs([(0, 5)], p)


def test_two_triangles_dataset():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    ds = build_dataset(g, Partition(np.array([0, 0, 0, 1, 1, 1])))
    assert len(ds) == 6 and ds.class_counts == (6, 0)


def test_bridge_labelled_inter():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    ds = build_dataset(g, Partition(np.array([0, 0, 0, 1, 1, 1])), SamplingConfig(include_second_order=False))
    bridge = np.flatnonzero((ds.pairs[:, 0] == 2) & (ds.pairs[:, 1] == 3))[0]
    assert ds.y[bridge] == 0
    assert ds.class_counts == (6, 1)


def test_dataset_invariants(rng):
    g = random_graph(rng, 25, 0.2)
    part = Partition(rng.integers(0, 3, 25))
    ds = build_dataset(g, part, rng_seed=2)
    first = ds.order == FIRST
    assert first.sum() == g.link_count
    links = g.link_set()
    for u, v in ds.pairs[ds.order == SECOND].tolist():
        assert (u, v) not in links
        assert g.neighbor_set(u) & g.neighbor_set(v)
    assert sum(ds.class_counts) == len(ds)
    again = build_dataset(g, part, rng_seed=2)
    assert np.array_equal(ds.X, again.X) and np.array_equal(ds.pairs, again.pairs)


def test_downsampling_keeps_links(rng):
    g = random_graph(rng, 25, 0.25)
    part = Partition(rng.integers(0, 2, 25))
    ds = build_dataset(g, part, SamplingConfig(downsample_majority=True))
    assert (ds.order == FIRST).sum() == g.link_count


def test_feature_mask_and_csv():
    g = load_edge_list(b"10 11\n11 12\n")
    ds = build_dataset(g, Partition(np.zeros(3, dtype=int)), SamplingConfig(feature_mask=(True, False, True)))
    assert ds.feature_names == ["r_deg", "r_cn"] and ds.X.shape == (3, 2)
    buf = io.StringIO()
    ds.to_csv(buf, g)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "u,v,order,r_deg,r_cc,r_cn,label"
    assert lines[1] == "10,11,first,1.0,,0.0,1"
    assert lines[2] == "10,12,second,0.0,,1.0,1"
    with pytest.raises(ValueError):
        build_dataset(g, Partition(np.zeros(3, dtype=int)), SamplingConfig(feature_mask=(False, False, False)))
