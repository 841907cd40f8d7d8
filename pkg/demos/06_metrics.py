"""
Evaluation metrics
==================

Weighted modularity, NMI, ARI, the Pearson test and the improvement delta.
"""
import numpy as np

from simcomm import Graph, Partition, ari, modularity, nmi, pearson_with_ttest, weighted_modularity
from simcomm.metrics import improvement_delta

# two triangles joined by one link
g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
p = Partition(np.array([0, 0, 0, 1, 1, 1]))
print("Q =", round(modularity(g, p), 4))  # 5/14

# the bridge counts for little once its weight drops
gw = Graph(6, g.edges, weights=[1, 1, 1, 1, 1, 1, 0.01])
print("Q^w =", round(weighted_modularity(gw, p), 4))
print("Q^w at gamma 2 =", round(weighted_modularity(gw, p, resolution=2.0), 4))

q = Partition(np.array([0, 0, 1, 1, 2, 2]))
print("NMI", round(nmi(p, q), 4), "ARI", round(ari(p, q), 4))

r = pearson_with_ttest([1, 2, 3, 4, 5], [2.1, 3.9, 6.2, 7.8, 10.1])
print("r =", round(r.r, 4), "p =", r.p_value, "n =", r.n)

print("delta:", round(improvement_delta(0.57, 0.50), 2), "%")
