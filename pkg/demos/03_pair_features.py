"""
Node-pair samples
=================

Links and distance-2 pairs become labelled samples with three structural
features: degree difference, clustering difference and common neighbours.
"""
import io

from simcomm import BenchmarkParams, SamplingConfig, build_dataset, featurize, generate

g, truth = generate(BenchmarkParams(m=3, n_target=80, rng_seed=4))
ds = build_dataset(g, truth, SamplingConfig())
n_intra, n_inter = ds.class_counts
print(len(ds), "pairs:", n_intra, "intra /", n_inter, "inter")
print("first-order:", int((ds.order == 0).sum()), "second-order:", int((ds.order == 1).sum()))

u, v = ds.pairs[0]
print("features of", (int(u), int(v)), "=", featurize(g, int(u), int(v)))

# the intra/inter imbalance can be evened out by thinning the majority class
bal = build_dataset(g, truth, SamplingConfig(downsample_majority=True))
print("downsampled:", bal.class_counts)

# drop the clustering feature
masked = build_dataset(g, truth, SamplingConfig(feature_mask=(True, False, True)))
print(masked.feature_names)

buf = io.StringIO()
ds.to_csv(buf, g)
print(buf.getvalue().splitlines()[:3])
