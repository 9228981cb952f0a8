"""BIT* planning in curvilinear coordinates around a taught reference path."""

from importlib import resources

from .costmap import Box, Circle, OccupancyGrid, edge_collides, insert_obstacle, is_occupied
from .edge_metric import MetricConfig, edge_cost, edge_cost_quadrature, heuristic_edge_cost
from .informed_sampling import InformedRegion, InformedSampler, compute_bounding_rect, f_hat, sample_free
from .planner import (
    LateralBITStar,
    PlannerConfig,
    PlanSolution,
    best_solution,
    nearest_neighbors,
    plan_init,
    run_batch,
)
from .reference_path import CurvilinearPoint, Pose, ReferencePath, build_reference_path

__version__ = "0.1.0"


def data_dir():
    """Directory holding the shipped scenario files."""
    return resources.files(__name__) / "data"


__all__ = [
    "Box",
    "Circle",
    "CurvilinearPoint",
    "InformedRegion",
    "InformedSampler",
    "LateralBITStar",
    "MetricConfig",
    "OccupancyGrid",
    "PlanSolution",
    "PlannerConfig",
    "Pose",
    "ReferencePath",
    "best_solution",
    "build_reference_path",
    "compute_bounding_rect",
    "data_dir",
    "edge_collides",
    "edge_cost",
    "edge_cost_quadrature",
    "f_hat",
    "heuristic_edge_cost",
    "insert_obstacle",
    "is_occupied",
    "nearest_neighbors",
    "plan_init",
    "run_batch",
    "sample_free",
]
