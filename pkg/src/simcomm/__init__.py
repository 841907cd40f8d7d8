"""Community detection reinforced by learned node-pair similarity.

Detect communities, learn which node pairs belong together from local
structure, reweight the network by the learned similarity and detect
again.
"""
from .bench import BenchmarkParams, generate
from .detect import DetectionResult, DetectorConfig, detect
from .features import SamplingConfig, build_dataset, featurize
from .graph import Graph, Partition, load_communities, load_edge_list
from .learn import LearnerConfig, cross_val_oof, fit_model, predict_proba
from .metrics import ari, evaluate, modularity, nmi, pearson_with_ttest, weighted_modularity
from .pipeline import Dataset, RunConfig, RunRecord, load_dataset, report, run_grid, run_pipeline
from .weave import SimilarityNetwork, build_similarity_network

__version__ = "0.1.0"

__all__ = [
    "BenchmarkParams",
    "Dataset",
    "DetectionResult",
    "DetectorConfig",
    "Graph",
    "LearnerConfig",
    "Partition",
    "RunConfig",
    "RunRecord",
    "SamplingConfig",
    "SimilarityNetwork",
    "ari",
    "build_dataset",
    "build_similarity_network",
    "cross_val_oof",
    "detect",
    "evaluate",
    "featurize",
    "fit_model",
    "generate",
    "load_communities",
    "load_dataset",
    "load_edge_list",
    "modularity",
    "nmi",
    "pearson_with_ttest",
    "predict_proba",
    "report",
    "run_grid",
    "run_pipeline",
    "weighted_modularity",
]
