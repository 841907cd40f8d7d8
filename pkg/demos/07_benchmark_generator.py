"""
Benchmark generator
===================

Tree-like growth with planted communities. With ``m`` links per new node
the graph has ``3 + m * (n - 3)`` links.
"""
import numpy as np

from simcomm import BenchmarkParams, generate, modularity
from simcomm.graph import average_clustering

for m in (1, 2, 3):
    g, truth = generate(BenchmarkParams(m=m, n_target=100, rng_seed=0))
    print(f"m={m}: {g.link_count} links, {truth.community_count} communities, "
          f"Q={modularity(g, truth):.3f}, CC={average_clustering(g):.3f}")

# community count across seeds
ks = [generate(BenchmarkParams(n_target=100, rng_seed=s))[1].community_count for s in range(50)]
print("communities over 50 seeds: mean", np.mean(ks), "range", min(ks), max(ks))

# lower p_intra blurs the planted structure
for p in (0.9, 0.6, 0.3):
    g, truth = generate(BenchmarkParams(m=2, n_target=200, p_intra=p, rng_seed=1))
    print("p_intra", p, "planted Q", round(modularity(g, truth), 3))
