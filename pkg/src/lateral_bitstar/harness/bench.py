"""Run scenarios in lateral or Euclidean mode and score the resulting paths."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from ..planner import LateralBITStar, PlanSolution
from .metrics import CoverageError, MetricsReport, RunResult, deviation_profile
from .scenario import Scenario, load_scenario

log = logging.getLogger(__name__)

MODES = ("lateral", "euclidean")


@dataclass
class RunTrace:
    """Everything needed to plot one run."""

    result: RunResult
    planner: LateralBITStar
    solution: Optional[PlanSolution]


def mode_alpha(scenario: Scenario, mode: str) -> float:
    if mode == "lateral":
        return scenario.planner.alpha
    if mode == "euclidean":
        return 0.0
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def run_single(
    scenario: Scenario,
    mode: str,
    seed: int,
    max_batches: Optional[int] = None,
    budget_ms: Optional[float] = None,
    path=None,
    grid=None,
) -> RunTrace:
    """Plan one seed to its budget and compute metrics against the reference.

    An explicit ``budget_ms`` replaces the scenario's batch budget with a wall-clock one.
    """
    path = scenario.reference_path() if path is None else path
    grid = scenario.occupancy_grid() if grid is None else grid
    overrides = {}
    if budget_ms is not None:
        overrides = dict(max_time=budget_ms / 1000.0, max_batches=max_batches)
    elif max_batches is not None:
        overrides = dict(max_batches=max_batches)
    cfg = scenario.planner.config(seed, alpha=mode_alpha(scenario, mode), **overrides)
    start, goal = scenario.endpoints(path)
    planner = LateralBITStar(path, grid, start, goal, cfg)
    reports = planner.run()
    solution = planner.best_solution()
    result = RunResult(scenario=scenario.name, mode=mode, seed=seed, solved=solution is not None)
    result.n_batches = len(reports)
    result.cost_history = list(planner.cost_history)
    if solution is not None:
        result.cost = solution.cost
        result.n_waypoints = len(solution.waypoints)
        result.first_solution_ms = 1000.0 * planner.first_solution_time
        try:
            _score(result, solution, path, scenario)
        except CoverageError as exc:
            log.warning("%s/%s seed %d: %s", scenario.name, mode, seed, exc)
            result.solved = False
    return RunTrace(result, planner, solution)


def _score(result: RunResult, solution: PlanSolution, path, scenario: Scenario) -> None:
    lateral, heading, max_dev = [], [], 0.0
    for lo, hi in scenario.metric_segments(path.p_len):
        prof = deviation_profile(solution.euclidean_waypoints, path, (lo, hi))
        result.segments.append((lo, hi, prof.trans_rmse, prof.rot_rmse))
        lateral.append(prof.lateral)
        heading.append(prof.heading_error)
        max_dev = max(max_dev, prof.max_lateral_deviation)
    # Per-segment RMSEs are averaged, matching how trials are aggregated.
    result.trans_rmse = sum(s[2] for s in result.segments) / len(result.segments)
    result.rot_rmse = sum(s[3] for s in result.segments) / len(result.segments)
    result.max_lateral_deviation = max_dev


def run_benchmark(
    scenario: Scenario,
    mode: str = "lateral",
    n_seeds: Optional[int] = None,
    max_batches: Optional[int] = None,
    budget_ms: Optional[float] = None,
    traces: Optional[List[RunTrace]] = None,
) -> MetricsReport:
    seeds = list(scenario.planner.seeds)
    if n_seeds is not None:
        seeds = seeds[:n_seeds] if n_seeds <= len(seeds) else seeds + list(range(max(seeds) + 1, max(seeds) + 1 + n_seeds - len(seeds)))
    path = scenario.reference_path()
    grid = scenario.occupancy_grid()
    runs = []
    for seed in seeds:
        trace = run_single(scenario, mode, seed, max_batches, budget_ms, path, grid)
        runs.append(trace.result)
        if traces is not None:
            traces.append(trace)
    return MetricsReport(scenario.name, mode, runs)


def load_suite(suite_dir) -> List[Scenario]:
    files = sorted(Path(suite_dir).glob("*.json"))
    if not files:
        raise FileNotFoundError(f"no scenario files in {suite_dir}")
    return [load_scenario(f) for f in files]


def run_suite(
    scenarios: Iterable[Scenario],
    modes: Sequence[str] = MODES,
    n_seeds: Optional[int] = None,
    max_batches: Optional[int] = None,
    budget_ms: Optional[float] = None,
) -> Dict[str, Dict[str, MetricsReport]]:
    out: Dict[str, Dict[str, MetricsReport]] = {}
    for sc in scenarios:
        out[sc.name] = {m: run_benchmark(sc, m, n_seeds, max_batches, budget_ms) for m in modes}
    return out
