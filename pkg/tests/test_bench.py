import numpy as np
import pytest

from simcomm.bench import BenchmarkParams, generate, intra_link_fraction
from simcomm.graph import average_clustering, is_connected_subset


def test_single_community_boundary():
    g, p = generate(BenchmarkParams(beta=0.0, p_intra=1.0, rng_seed=3))
    assert p.community_count == 1
    assert intra_link_fraction(g, p) == 1.0


def test_link_count_and_sparsity():
    for m in (1, 2, 3):
        g, _ = generate(BenchmarkParams(m=m, rng_seed=1))
        # initial triangle plus m links for each of the 97 later nodes
        assert g.link_count == 3 + 97 * m
    cc = [average_clustering(generate(BenchmarkParams(rng_seed=s))[0]) for s in range(100)]
    assert np.mean(cc) < 0.05


def test_connected_and_covering():
    for s in range(20):
        g, p = generate(BenchmarkParams(m=2, rng_seed=s))
        assert is_connected_subset(g, range(g.node_count))
        assert p.node_count == g.node_count == 100


def test_deterministic():
    a = generate(BenchmarkParams(rng_seed=9))
    b = generate(BenchmarkParams(rng_seed=9))
    assert a[0] == b[0] and a[1] == b[1]


def test_more_founding_with_larger_beta():
    small = np.mean([generate(BenchmarkParams(beta=0.02, rng_seed=s))[1].community_count for s in range(40)])
    large = np.mean([generate(BenchmarkParams(beta=0.5, rng_seed=s))[1].community_count for s in range(40)])
    assert small < large


@pytest.mark.parametrize("kw", [dict(m=0), dict(k_init=2), dict(n_target=3), dict(p_intra=1.5), dict(beta=-0.1)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        BenchmarkParams(**kw)
