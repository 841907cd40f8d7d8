"""
Graphs, partitions and ground truth
===================================

Loading a SNAP-style edge list, attaching overlapping ground-truth
communities and reducing them to a hard partition.
"""
import io

import numpy as np

from simcomm.graph import (
    Partition,
    average_clustering,
    deoverlap,
    load_communities,
    load_edge_list,
    prune_links,
)

# a small undirected edge list; comments, duplicates and self loops are dropped
edges = io.StringIO("""# toy network
1 2
2 3
3 1
3 1
4 4
4 5
5 6
6 4
3 4
""")
g = load_edge_list(edges)
print(g.node_count, "nodes,", g.link_count, "links")
print("dataset ids:", g.node_ids.tolist())
print("average clustering:", round(average_clustering(g), 3))

# SNAP cmty files list one community per line; node 3 sits in both
cmty = io.StringIO("1 2 3\n3 4 5 6\n")
raw = load_communities(cmty, format="one-community-per-line")
hard = deoverlap(raw, rng_seed=0)
print("node -> community:", dict(sorted(hard.assignment.items())), "dropped:", hard.dropped)

# links whose endpoints lost their ground-truth label are pruned
g2 = prune_links(g, hard)
print("after pruning:", g2.node_count, "nodes,", g2.link_count, "links")

# partitions are relabelled to 0..k-1 in order of first appearance
p = Partition(np.array([7, 7, 2, 2, 9]))
print(p.labels, p.community_count, p.communities())
