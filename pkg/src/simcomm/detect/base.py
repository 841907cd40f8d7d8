from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import Graph, Partition

DETECTORS = ("louvain", "leiden", "fast_greedy", "infomap")


@dataclass(frozen=True)
class DetectorConfig:
    detector: str = "leiden"
    resolution: float = 1.0
    rng_seed: int = 0
    max_passes: int = 50
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ValueError(f"unknown detector {self.detector!r}; expected one of {DETECTORS}")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class DetectionResult:
    """Detected partition with its objective.

    ``objective`` is weighted modularity for the modularity detectors and
    the two-level codelength in bits for Infomap. ``trace`` holds the
    objective after every pass (every merge for Fast-Greedy).
    """

    partition: Partition
    objective: float
    passes_used: int
    trace: list[float] = field(default_factory=list)


def check_graph(graph: Graph) -> None:
    if graph.node_count == 0 or graph.link_count == 0:
        raise ValueError("community detection needs a graph with at least one link")
    if graph.total_weight <= 0:
        raise ValueError("community detection needs a positive total link weight")
