"""Threshold-constrained scheduling for full-duplex 1-2-1 mmWave relay networks."""

from .bounds import BoundReport, bound_report, theorem1_check
from .lp.builders import approximate_capacity, build_p1, build_p2, passive_capacity
from .network import Network, Path, ThresholdMap, generate_random, load, save, validate
from .paths import count_edge_disjoint, count_vertex_disjoint, decompose_flow, enumerate_paths
from .scheduler import BeamSchedule, schedule_from_activations
from .security import passive_to_secure, secure_to_passive

__version__ = "0.1.0"

__all__ = [
    "BeamSchedule",
    "BoundReport",
    "Network",
    "Path",
    "ThresholdMap",
    "approximate_capacity",
    "bound_report",
    "build_p1",
    "build_p2",
    "count_edge_disjoint",
    "count_vertex_disjoint",
    "decompose_flow",
    "enumerate_paths",
    "generate_random",
    "load",
    "passive_capacity",
    "passive_to_secure",
    "save",
    "schedule_from_activations",
    "secure_to_passive",
    "theorem1_check",
    "validate",
]
