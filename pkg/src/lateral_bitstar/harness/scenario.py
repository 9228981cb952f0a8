"""Scenario files: one JSON document per planning problem, strictly validated."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..costmap import Box, Circle, OccupancyGrid
from ..planner import PlannerConfig
from ..reference_path import CurvilinearPoint, ReferencePath, build_reference_path


class ScenarioError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CircleSpec(_Strict):
    type: Literal["circle"] = "circle"
    center: Tuple[float, float]
    radius: float = Field(gt=0)


class BoxSpec(_Strict):
    type: Literal["box"] = "box"
    lo: Tuple[float, float]
    hi: Tuple[float, float]

    @model_validator(mode="after")
    def _ordered(self):
        if not (self.hi[0] > self.lo[0] and self.hi[1] > self.lo[1]):
            raise ValueError("box hi must exceed lo on both axes")
        return self


ObstacleSpec = Union[CircleSpec, BoxSpec]


class GridSpec(_Strict):
    origin: Tuple[float, float]
    resolution: float = Field(default=0.1, gt=0)
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    inflation_radius: float = Field(default=0.3, ge=0)

    def contains(self, x: float, y: float) -> bool:
        return (
            self.origin[0] <= x <= self.origin[0] + self.width * self.resolution
            and self.origin[1] <= y <= self.origin[1] + self.height * self.resolution
        )


class PlannerSpec(_Strict):
    alpha: float = Field(default=0.5, ge=0)
    samples_per_batch: int = Field(default=150, ge=1)
    rgg_eta: float = Field(default=1.1, ge=1)
    collision_step: float = Field(default=0.2, gt=0)
    collision_substeps: int = Field(default=10, ge=1)
    max_batches: Optional[int] = Field(default=10, ge=1)
    max_time: Optional[float] = Field(default=None, gt=0)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    reject_f_hat: bool = True

    def config(self, seed: int, alpha: Optional[float] = None, **overrides) -> PlannerConfig:
        kw = dict(
            samples_per_batch=self.samples_per_batch,
            rgg_eta=self.rgg_eta,
            alpha=self.alpha if alpha is None else alpha,
            collision_step=self.collision_step,
            collision_substeps=self.collision_substeps,
            max_batches=self.max_batches,
            max_time=self.max_time,
            rng_seed=seed,
            reject_f_hat=self.reject_f_hat,
        )
        kw.update(overrides)
        return PlannerConfig(**kw)


class PointSpec(_Strict):
    p: float
    q: float = 0.0


class Scenario(_Strict):
    name: str = Field(min_length=1)
    poses: List[Tuple[float, float, float]] = Field(min_length=2)
    yaw_weight: float = Field(default=0.1, ge=0)
    q_bounds: Union[Tuple[float, float], List[Tuple[float, float]]] = (-2.0, 2.0)
    obstacles: List[ObstacleSpec] = Field(default_factory=list)
    grid: GridSpec
    planner: PlannerSpec = Field(default_factory=PlannerSpec)
    start: Optional[PointSpec] = None
    goal: Optional[PointSpec] = None
    metric_segment_length: float = Field(default=15.0, gt=0)
    description: str = ""

    @field_validator("poses")
    @classmethod
    def _finite(cls, poses):
        for k, pose in enumerate(poses):
            if not all(math.isfinite(v) for v in pose):
                raise ValueError(f"pose {k} is not finite")
        return poses

    @property
    def warnings(self) -> List[str]:
        """Non-fatal findings, e.g. obstacles whose anchor points fall off the grid."""
        out = []
        for k, ob in enumerate(self.obstacles):
            pts = [ob.center] if isinstance(ob, CircleSpec) else [ob.lo, ob.hi]
            if not all(self.grid.contains(*pt) for pt in pts):
                out.append(f"obstacles[{k}] lies (partly) outside the grid")
        return out

    # -- derived objects -------------------------------------------------
    def reference_path(self) -> ReferencePath:
        bounds = self.q_bounds
        return build_reference_path(self.poses, self.yaw_weight, bounds)

    def occupancy_grid(self) -> OccupancyGrid:
        g = self.grid
        grid = OccupancyGrid(g.origin, g.resolution, g.width, g.height, g.inflation_radius)
        for ob in self.obstacles:
            if isinstance(ob, CircleSpec):
                grid.insert(Circle(tuple(ob.center), ob.radius))
            else:
                grid.insert(Box(tuple(ob.lo), tuple(ob.hi)))
        return grid.freeze()

    def endpoints(self, path: ReferencePath) -> Tuple[CurvilinearPoint, CurvilinearPoint]:
        start = CurvilinearPoint(self.start.p, self.start.q) if self.start else CurvilinearPoint(0.0, 0.0)
        goal = CurvilinearPoint(self.goal.p, self.goal.q) if self.goal else CurvilinearPoint(path.p_len, 0.0)
        return start, goal

    def metric_segments(self, p_len: float) -> List[Tuple[float, float]]:
        """Consecutive windows of ``metric_segment_length`` covering the path."""
        n = max(1, int(math.floor(p_len / self.metric_segment_length + 1e-9)))
        edges = [min(k * self.metric_segment_length, p_len) for k in range(n)] + [p_len]
        return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_defaults=False), indent=1) + "\n"


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}:{exc.colno}: parse error: {exc.msg}") from exc
    try:
        return Scenario.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ScenarioError(f"{source}: invalid field '{loc}': {first['msg']}") from exc


def load_scenario(file: Union[str, Path]) -> Scenario:
    path = Path(file)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


def save_scenario(scenario: Scenario, file: Union[str, Path]) -> Path:
    path = Path(file)
    path.write_text(scenario.to_json(), encoding="utf-8")
    return path
