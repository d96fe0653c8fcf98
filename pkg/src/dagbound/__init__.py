"""Response-time bounds for DAG tasks under work-conserving scheduling,
computed from generalized path lists via a min-cost flow reduction."""

from .bounds import (
    METHODS,
    BoundReport,
    TaskAnalysis,
    bound,
    federated_core_count,
    graham_bound,
    greedy_path_list,
    longest_constrained_path_list,
    multipath_bound_with_list,
    normalized_bound,
    optimal_bound,
    para_bound_with_list,
)
from .flow import build_reduction_network, brute_force_max_volume, min_cost_profile
from .taskgraph import (
    CycleDetected,
    DagTask,
    InvalidPathList,
    MalformedInput,
    normalize,
    validate_and_normalize,
)

__all__ = [
    "METHODS",
    "BoundReport",
    "CycleDetected",
    "DagTask",
    "InvalidPathList",
    "MalformedInput",
    "TaskAnalysis",
    "bound",
    "brute_force_max_volume",
    "build_reduction_network",
    "federated_core_count",
    "graham_bound",
    "greedy_path_list",
    "longest_constrained_path_list",
    "min_cost_profile",
    "multipath_bound_with_list",
    "normalize",
    "normalized_bound",
    "optimal_bound",
    "para_bound_with_list",
    "validate_and_normalize",
]
