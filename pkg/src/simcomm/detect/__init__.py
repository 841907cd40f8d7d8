"""Community detectors: Louvain, Leiden, Fast-Greedy (CNM) and Infomap."""
from __future__ import annotations

from ..graph import Graph
from .base import DETECTORS, DetectionResult, DetectorConfig
from .fast_greedy import fast_greedy, merge_sequence
from .infomap import infomap, map_equation
from .leiden import leiden
from .louvain import louvain

_DISPATCH = {
    "louvain": louvain,
    "leiden": leiden,
    "fast_greedy": fast_greedy,
    "infomap": infomap,
}


def detect(graph: Graph, config: DetectorConfig) -> DetectionResult:
    """Run the detector named by ``config.detector``."""
    return _DISPATCH[config.detector](graph, config)


__all__ = [
    "DETECTORS",
    "DetectionResult",
    "DetectorConfig",
    "detect",
    "fast_greedy",
    "infomap",
    "leiden",
    "louvain",
    "map_equation",
    "merge_sequence",
]
