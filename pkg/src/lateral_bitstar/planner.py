"""Batch Informed Trees over the curvilinear corridor.

The search runs entirely in (p, q) space with the laterally weighted edge
cost; every candidate edge is collision-checked by mapping discretised points
back to Euclidean space. Cost-to-come/go heuristics are plain (p, q)
distances, which lower-bound the weighted cost of any path. The informed
sampler uses the tighter two-edge estimate to shape new batches.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .costmap import DEFAULT_COLLISION_STEP, OccupancyGrid, discretize_edge
from .edge_metric import DEFAULT_ALPHA, weighted_cost
from .informed_sampling import InformedRegion, InformedSampler, SamplingWarning, compute_bounding_rect
from .reference_path import CurvilinearPoint, ReferencePath

INF = math.inf
# Unit-disc area for the 2D RGG radius.
ZETA_2 = math.pi


class PlannerConfigError(ValueError):
    pass


class InfeasibleEndpointError(ValueError):
    """Start or goal lies in collision or outside the corridor."""


@dataclass(frozen=True)
class PlannerConfig:
    samples_per_batch: int = 150
    rgg_eta: float = 1.1
    alpha: float = DEFAULT_ALPHA
    collision_step: float = DEFAULT_COLLISION_STEP
    # edges are checked at collision_step / collision_substeps; a 0.1 m grid lets 0.2 m
    # samples straddle protruding inflated cells
    collision_substeps: int = 10
    max_batches: Optional[int] = None
    max_time: Optional[float] = None
    rng_seed: int = 0
    prune: bool = True
    # restrict new samples to the bounding rectangle once a solution exists
    informed: bool = True
    reject_f_hat: bool = True

    def __post_init__(self) -> None:
        if int(self.samples_per_batch) < 1:
            raise PlannerConfigError("samples_per_batch must be >= 1")
        if not self.rgg_eta >= 1.0:
            raise PlannerConfigError("rgg_eta must be >= 1")
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise PlannerConfigError("alpha must be finite and >= 0")
        if not self.collision_step > 0.0:
            raise PlannerConfigError("collision_step must be positive")
        if int(self.collision_substeps) < 1:
            raise PlannerConfigError("collision_substeps must be >= 1")


@dataclass(frozen=True)
class BatchReport:
    batch: int
    new_samples: int
    edges_expanded: int
    best_cost: float
    n_vertices: int
    n_samples: int
    radius: float
    complete: bool


@dataclass(frozen=True)
class PlanSolution:
    waypoints: Tuple[CurvilinearPoint, ...]
    cost: float
    euclidean_waypoints: Tuple[Tuple[float, float], ...]
    wall_time_found: float


@dataclass
class _Point:
    """Per-state bookkeeping; states are indexed by integer id."""

    p: float
    q: float
    g_hat: float
    h_hat: float
    g: float = INF
    parent: int = -1
    children: set = field(default_factory=set)


def rgg_radius(n: int, measure: float, eta: float, diameter: float) -> float:
    """Shrinking RGG connection radius in two dimensions, capped at ``diameter``."""
    if n <= 1 or measure <= 0.0:
        return diameter
    d = 2
    r = eta * 2.0 * math.sqrt((1.0 + 1.0 / d) * (measure / ZETA_2) * (math.log(n) / n))
    return min(r, diameter)


class LateralBITStar:
    """Anytime BIT* planner over a reference path's curvilinear corridor."""

    def __init__(
        self,
        path: ReferencePath,
        grid: Optional[OccupancyGrid],
        start: CurvilinearPoint,
        goal: CurvilinearPoint,
        cfg: PlannerConfig = PlannerConfig(),
    ):
        self.path = path
        self.grid = grid
        self.cfg = cfg
        self.start = CurvilinearPoint(float(start.p), float(start.q))
        self.goal = CurvilinearPoint(float(goal.p), float(goal.q))
        for name, pt in (("start", self.start), ("goal", self.goal)):
            self._check_endpoint(name, pt)
        self._t0 = time.perf_counter()
        self.sampler = InformedSampler(path, grid, cfg.rng_seed, reject_f_hat=cfg.reject_f_hat)
        self._pts: List[_Point] = []
        self._cap = 0
        self._P = np.empty(0)
        self._Q = np.empty(0)
        self._vertex_mask = np.empty(0, dtype=bool)
        self._sample_mask = np.empty(0, dtype=bool)
        self._root = self._add_point(self.start.p, self.start.q)
        self._goal = self._add_point(self.goal.p, self.goal.q)
        self._pts[self._root].g = 0.0
        self._vertex_mask[self._root] = True
        self._sample_mask[self._goal] = True
        self._collision_cache: Dict[Tuple[int, int], bool] = {}
        self._grid_version = grid.version if grid is not None else 0
        self._edge_queue: list = []
        self._vertex_queue: list = []
        self._counter = itertools.count()
        self._old_vertices: set = set()
        self.best_cost = INF
        self.batches = 0
        self.radius = INF
        self.cost_history: List[Tuple[float, float]] = []
        self.first_solution_time: Optional[float] = None
        self.published: Optional[PlanSolution] = None
        self._degenerate = self.start == self.goal
        if self._degenerate:
            self._connect(self._root, self._goal, 0.0)

    # ------------------------------------------------------------------ setup
    def _check_endpoint(self, name: str, pt: CurvilinearPoint) -> None:
        if not (0.0 <= pt.p <= self.path.p_len):
            raise InfeasibleEndpointError(f"{name} p={pt.p} outside [0, {self.path.p_len}]")
        lo, hi = self.path.q_limits(pt.p)
        if not (lo <= pt.q <= hi):
            raise InfeasibleEndpointError(f"{name} q={pt.q} outside corridor [{lo}, {hi}]")
        if self.grid is not None:
            x, y = self.path.pq_to_xy(pt)
            if self.grid.is_occupied(x, y):
                raise InfeasibleEndpointError(f"{name} ({x:.3f}, {y:.3f}) is in collision")

    def _add_point(self, p: float, q: float) -> int:
        idx = len(self._pts)
        if idx >= self._cap:
            cap = max(64, 2 * self._cap)
            for attr, fill in (("_P", 0.0), ("_Q", 0.0), ("_vertex_mask", False), ("_sample_mask", False)):
                old = getattr(self, attr)
                new = np.full(cap, fill, dtype=old.dtype)
                new[: old.size] = old
                setattr(self, attr, new)
            self._cap = cap
        g_hat = math.hypot(p - self.start.p, q - self.start.q)
        h_hat = math.hypot(p - self.goal.p, q - self.goal.q)
        self._pts.append(_Point(p, q, g_hat, h_hat))
        self._P[idx] = p
        self._Q[idx] = q
        return idx

    # -------------------------------------------------------------- accessors
    @property
    def n_vertices(self) -> int:
        return int(self._vertex_mask[: len(self._pts)].sum())

    @property
    def n_samples(self) -> int:
        return int(self._sample_mask[: len(self._pts)].sum())

    def point(self, idx: int) -> CurvilinearPoint:
        pt = self._pts[idx]
        return CurvilinearPoint(pt.p, pt.q)

    def vertex_ids(self) -> List[int]:
        return [int(i) for i in np.nonzero(self._vertex_mask[: len(self._pts)])[0]]

    def sample_ids(self) -> List[int]:
        return [int(i) for i in np.nonzero(self._sample_mask[: len(self._pts)])[0]]

    def parent_of(self, idx: int) -> int:
        return self._pts[idx].parent

    def cost_to_come(self, idx: int) -> float:
        return self._pts[idx].g

    def tree_edges(self) -> List[Tuple[CurvilinearPoint, CurvilinearPoint]]:
        return [(self.point(pt.parent), self.point(i)) for i in self.vertex_ids() if (pt := self._pts[i]).parent >= 0]

    def f_hat_admissible(self, idx: int) -> float:
        pt = self._pts[idx]
        return pt.g_hat + pt.h_hat

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    # ------------------------------------------------------------ geometry
    def informed_region(self) -> Optional[InformedRegion]:
        if not (self.cfg.informed and math.isfinite(self.best_cost)):
            return None
        if self.start.q != 0.0 or self.goal.q != 0.0 or self.start.p == self.goal.p:
            return None
        return compute_bounding_rect(self.start.p, self.goal.p, self.best_cost, self.cfg.alpha)

    def _diameter(self) -> float:
        return math.hypot(self.path.p_len, self.path.q_max - self.path.q_min)

    def connection_radius(self, n: Optional[int] = None) -> float:
        if n is None:
            n = self.n_vertices + self.n_samples
        return rgg_radius(n, self.sampler.measure(self.informed_region()), self.cfg.rgg_eta, self._diameter())

    def near(self, p: float, q: float, radius: Optional[float] = None) -> Tuple[List[int], List[int]]:
        """Ids of vertices and of unconnected samples within ``radius`` of (p, q)."""
        r = self.radius if radius is None else radius
        if not math.isfinite(r):
            r = self.connection_radius()
        n = len(self._pts)
        d2 = (self._P[:n] - p) ** 2 + (self._Q[:n] - q) ** 2
        close = d2 <= r * r
        verts = np.nonzero(close & self._vertex_mask[:n])[0]
        samples = np.nonzero(close & self._sample_mask[:n])[0]
        return verts.tolist(), samples.tolist()

    def nearest_neighbors(self, x: CurvilinearPoint) -> Tuple[List[CurvilinearPoint], List[CurvilinearPoint]]:
        verts, samples = self.near(x.p, x.q)
        return [self.point(i) for i in verts], [self.point(i) for i in samples]

    def _edge_cost(self, u: int, v: int) -> float:
        a, b = self._pts[u], self._pts[v]
        return weighted_cost(self.cfg.alpha, a.p, a.q, b.p, b.q)

    def _c_hat(self, u: int, v: int) -> float:
        a, b = self._pts[u], self._pts[v]
        return math.hypot(b.p - a.p, b.q - a.q)

    def _collides(self, u: int, v: int) -> bool:
        if self.grid is None:
            return False
        if self.grid.version != self._grid_version:
            self._collision_cache.clear()
            self._grid_version = self.grid.version
        key = (u, v) if u < v else (v, u)
        hit = self._collision_cache.get(key)
        if hit is None:
            a, b = self._pts[u], self._pts[v]
            ps, qs = discretize_edge(a, b, self.cfg.collision_step / self.cfg.collision_substeps)
            xs, ys = self.path.pq_to_xy_array(ps, qs)
            hit = bool(self.grid.occupied_at(xs, ys).any())
            self._collision_cache[key] = hit
        return hit

    # ---------------------------------------------------------------- tree ops
    def _connect(self, parent: int, child: int, cost: float) -> None:
        ch = self._pts[child]
        if ch.parent >= 0:
            self._pts[ch.parent].children.discard(child)
        ch.parent = parent
        self._pts[parent].children.add(child)
        delta_root = self._pts[parent].g + cost
        self._vertex_mask[child] = True
        self._sample_mask[child] = False
        self._propagate(child, delta_root)

    def _propagate(self, idx: int, g_new: float) -> None:
        stack = [(idx, g_new)]
        while stack:
            i, g = stack.pop()
            pt = self._pts[i]
            pt.g = g
            for c in pt.children:
                stack.append((c, g + self._edge_cost(i, c)))
        goal_g = self._pts[self._goal].g
        if goal_g < self.best_cost:
            self.best_cost = goal_g
            t = self.elapsed()
            if self.first_solution_time is None:
                self.first_solution_time = t
            self.cost_history.append((t, goal_g))

    def _push_vertex(self, v: int) -> None:
        pt = self._pts[v]
        heapq.heappush(self._vertex_queue, (pt.g + pt.h_hat, pt.h_hat, next(self._counter), v))

    def _push_edge(self, v: int, x: int, c_hat: float) -> None:
        h = self._pts[x].h_hat
        heapq.heappush(self._edge_queue, (self._pts[v].g + c_hat + h, h, next(self._counter), v, x))

    def _expand_vertex(self, v: int) -> None:
        pv = self._pts[v]
        verts, samples = self.near(pv.p, pv.q)
        c_best = self.best_cost
        for x in samples:
            c_hat = self._c_hat(v, x)
            if pv.g_hat + c_hat + self._pts[x].h_hat < c_best:
                self._push_edge(v, x, c_hat)
        if v in self._old_vertices:
            return
        for w in verts:
            if w == v or w == pv.parent or self._pts[w].parent == v:
                continue
            pw = self._pts[w]
            c_hat = self._c_hat(v, w)
            if pv.g_hat + c_hat + pw.h_hat < c_best and pv.g + c_hat < pw.g:
                self._push_edge(v, w, c_hat)

    def _remove_point(self, idx: int) -> None:
        self._vertex_mask[idx] = False
        self._sample_mask[idx] = False

    def _prune(self, c: float) -> None:
        n = len(self._pts)
        for i in np.nonzero(self._sample_mask[:n])[0]:
            if i != self._goal and self.f_hat_admissible(int(i)) >= c:
                self._sample_mask[i] = False
        doomed = []
        for i in self.vertex_ids():
            if i in (self._root, self._goal):
                continue
            pt = self._pts[i]
            if pt.g_hat + pt.h_hat > c * (1.0 + 1e-12):
                doomed.append((i, False))
            elif pt.g + pt.h_hat > c * (1.0 + 1e-12):
                doomed.append((i, True))
        for i, keep_as_sample in doomed:
            if not self._vertex_mask[i]:
                continue
            self._detach_subtree(i)
            if not keep_as_sample:
                self._sample_mask[i] = False

    def _detach_subtree(self, idx: int) -> None:
        """Disconnect ``idx`` and its descendants; they become unconnected samples."""
        pt = self._pts[idx]
        if pt.parent >= 0:
            self._pts[pt.parent].children.discard(idx)
        stack = [idx]
        while stack:
            i = stack.pop()
            node = self._pts[i]
            stack.extend(node.children)
            node.children = set()
            node.parent = -1
            node.g = INF
            self._vertex_mask[i] = False
            self._sample_mask[i] = self.f_hat_admissible(i) < self.best_cost or i == self._goal

    # ------------------------------------------------------------- main loop
    def _start_batch(self) -> int:
        if self.cfg.prune and math.isfinite(self.best_cost):
            self._prune(self.best_cost)
        region = self.informed_region()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SamplingWarning)
            ps, qs = self.sampler.sample_arrays(self.cfg.samples_per_batch, region)
        for p, q in zip(ps.tolist(), qs.tolist()):
            idx = self._add_point(p, q)
            self._sample_mask[idx] = True
        self._old_vertices = set(self.vertex_ids())
        self._vertex_queue = []
        self._edge_queue = []
        for v in self._old_vertices:
            self._push_vertex(v)
        self.radius = self.connection_radius()
        return len(ps)

    def _edge_best(self) -> float:
        return self._edge_queue[0][0] if self._edge_queue else INF

    def run_batch(self, deadline: Optional[float] = None) -> BatchReport:
        """Add one batch of samples and search until the queues are exhausted."""
        if self._degenerate:
            self.batches += 1
            return BatchReport(self.batches, 0, 0, self.best_cost, self.n_vertices, self.n_samples, 0.0, True)
        new = self._start_batch()
        expanded = 0
        complete = True
        steps = 0
        vq, eq, pts = self._vertex_queue, self._edge_queue, self._pts
        while True:
            steps += 1
            if deadline is not None and steps % 32 == 0 and time.perf_counter() >= deadline:
                complete = False
                break
            while vq and (not eq or vq[0][0] <= eq[0][0]):
                _, _, _, v = heapq.heappop(vq)
                if self._vertex_mask[v]:
                    self._expand_vertex(v)
            if not eq:
                break
            _, _, _, v, x = heapq.heappop(eq)
            if not self._vertex_mask[v] or not (self._vertex_mask[x] or self._sample_mask[x]):
                continue
            pv, px = pts[v], pts[x]
            c_hat = math.hypot(px.p - pv.p, px.q - pv.q)
            c_best = self.best_cost
            if pv.g + c_hat + px.h_hat >= c_best:
                self._edge_queue.clear()
                self._vertex_queue.clear()
                break
            if pv.g + c_hat >= px.g or x == self._root:
                continue
            expanded += 1
            c = weighted_cost(self.cfg.alpha, pv.p, pv.q, px.p, px.q)
            if pv.g_hat + c + px.h_hat >= c_best or pv.g + c >= px.g:
                continue
            if self._collides(v, x):
                continue
            was_vertex = bool(self._vertex_mask[x])
            self._connect(v, x, c)
            if not was_vertex:
                self._push_vertex(x)
        self.batches += 1
        self.published = self.best_solution()
        return BatchReport(
            self.batches, new, expanded, self.best_cost, self.n_vertices, self.n_samples, self.radius, complete
        )

    def run(self, max_batches: Optional[int] = None, max_time: Optional[float] = None) -> List[BatchReport]:
        """Run batches until either budget is spent (both default to the config)."""
        max_batches = self.cfg.max_batches if max_batches is None else max_batches
        max_time = self.cfg.max_time if max_time is None else max_time
        if max_batches is None and max_time is None:
            raise PlannerConfigError("need max_batches or max_time to bound the run")
        deadline = None if max_time is None else self._t0 + max_time
        reports = []
        while max_batches is None or len(reports) < max_batches:
            if deadline is not None and time.perf_counter() >= deadline:
                break
            reports.append(self.run_batch(deadline))
            if self._degenerate:
                break
        return reports

    # --------------------------------------------------------------- output
    def solution_ids(self) -> Optional[List[int]]:
        if not math.isfinite(self.best_cost):
            return None
        ids = [self._goal]
        while ids[-1] != self._root:
            ids.append(self._pts[ids[-1]].parent)
        return ids[::-1]

    def best_solution(self) -> Optional[PlanSolution]:
        ids = self.solution_ids()
        if ids is None:
            return None
        waypoints = tuple(self.point(i) for i in ids)
        cost = sum(
            weighted_cost(self.cfg.alpha, a.p, a.q, b.p, b.q) for a, b in zip(waypoints[:-1], waypoints[1:])
        )
        return PlanSolution(
            waypoints=waypoints,
            cost=cost,
            euclidean_waypoints=densify(self.path, waypoints, self.cfg.collision_step),
            wall_time_found=self.cost_history[-1][0] if self.cost_history else 0.0,
        )


def densify(path: ReferencePath, waypoints: Sequence[CurvilinearPoint], step: float):
    """Map a (p, q) polyline to Euclidean points, each edge discretised at ``step``."""
    if len(waypoints) == 1:
        return (path.pq_to_xy(waypoints[0]),)
    ps_all, qs_all = [], []
    for k, (a, b) in enumerate(zip(waypoints[:-1], waypoints[1:])):
        ps, qs = discretize_edge(a, b, step)
        if k:
            ps, qs = ps[1:], qs[1:]
        ps_all.append(ps)
        qs_all.append(qs)
    xs, ys = path.pq_to_xy_array(np.concatenate(ps_all), np.concatenate(qs_all))
    return tuple(zip(xs.tolist(), ys.tolist()))


def plan_init(path, grid, start, goal, cfg: PlannerConfig = PlannerConfig()) -> LateralBITStar:
    return LateralBITStar(path, grid, start, goal, cfg)


def run_batch(planner: LateralBITStar) -> BatchReport:
    return planner.run_batch()


def best_solution(planner: LateralBITStar) -> Optional[PlanSolution]:
    return planner.best_solution()


def nearest_neighbors(planner: LateralBITStar, x: CurvilinearPoint):
    return planner.nearest_neighbors(x)
