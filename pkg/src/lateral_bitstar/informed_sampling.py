"""Uniform and informed sampling of the curvilinear corridor.

Once a solution of cost ``c_best`` exists, samples are drawn from a rectangle
that conservatively bounds ``{x : f_hat(x) <= c_best}`` under the laterally
weighted metric, optionally followed by direct rejection on ``f_hat``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .costmap import OccupancyGrid
from .reference_path import CurvilinearPoint, ReferencePath

ROOT_TOL = 1e-14


class InfeasibleRegionError(ValueError):
    """The requested cost bound is below the straight-line minimum."""


class SamplingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InformedRegion:
    p_start: float
    p_goal: float
    c_best: float
    c_min: float
    alpha: float
    q_bound: float
    p_lo: float
    p_hi: float

    @property
    def area(self) -> float:
        return (self.p_hi - self.p_lo) * 2.0 * self.q_bound


def f_hat_array(region: InformedRegion, p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    q2 = q * q
    focal = np.sqrt((p - region.p_start) ** 2 + q2) + np.sqrt((p - region.p_goal) ** 2 + q2)
    return (1.0 + region.alpha / 3.0 * q2) * focal


def f_hat(region: InformedRegion, x) -> float:
    """Estimated cost of the two-edge path start -> x -> goal."""
    p, q = (x.p, x.q) if hasattr(x, "p") else x
    q2 = q * q
    focal = math.sqrt((p - region.p_start) ** 2 + q2) + math.sqrt((p - region.p_goal) ** 2 + q2)
    return (1.0 + region.alpha / 3.0 * q2) * focal


def _height_residual(q: float, c_min: float, c_best: float, alpha: float) -> float:
    # min focal sum at lateral offset q is attained midway between the foci
    return (1.0 + alpha / 3.0 * q * q) * math.sqrt(c_min * c_min + 4.0 * q * q) - c_best


def compute_bounding_rect(p_start: float, p_goal: float, c_best: float, alpha: float) -> InformedRegion:
    """Rectangle containing every (p, q) with ``f_hat <= c_best``."""
    c_min = abs(p_goal - p_start)
    if c_best < c_min * (1.0 - 1e-12) - 1e-12:
        raise InfeasibleRegionError(f"c_best={c_best} is below c_min={c_min}")
    c_best = max(c_best, c_min)
    # root of the alpha = 0 residual; the weighted residual is >= 0 there
    hi = 0.5 * math.sqrt(max(c_best * c_best - c_min * c_min, 0.0))
    lo = 0.0
    if alpha > 0.0 and hi > 0.0:
        # keep the upper bracket (conservative); stop once it cannot move further
        while hi - lo > ROOT_TOL * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _height_residual(mid, c_min, c_best, alpha) > 0.0:
                hi = mid
            else:
                lo = mid
    half_excess = 0.5 * (c_best - c_min)
    return InformedRegion(
        p_start=p_start,
        p_goal=p_goal,
        c_best=c_best,
        c_min=c_min,
        alpha=alpha,
        q_bound=hi,
        p_lo=min(p_start, p_goal) - half_excess,
        p_hi=max(p_start, p_goal) + half_excess,
    )


class InformedSampler:
    """Draws collision-free corridor samples, informed once a region is given.

    Owns its RNG (PCG64); identical seeds give identical sample streams.
    """

    def __init__(
        self,
        path: ReferencePath,
        grid: Optional[OccupancyGrid],
        rng_seed: int = 0,
        reject_f_hat: bool = True,
        max_attempts_factor: int = 200,
    ):
        self.path = path
        self.grid = grid
        self.rng = np.random.default_rng(rng_seed)
        self.reject_f_hat = reject_f_hat
        self.max_attempts_factor = max_attempts_factor
        self.attempts = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else float("nan")

    def sampling_box(self, region: Optional[InformedRegion] = None):
        """(p_lo, p_hi, q_lo, q_hi) of the current proposal box, clipped to the corridor."""
        p_lo, p_hi = 0.0, self.path.p_len
        q_lo, q_hi = self.path.q_min, self.path.q_max
        if region is not None:
            p_lo, p_hi = max(p_lo, region.p_lo), min(p_hi, region.p_hi)
            q_lo, q_hi = max(q_lo, -region.q_bound), min(q_hi, region.q_bound)
        return p_lo, p_hi, q_lo, q_hi

    def measure(self, region: Optional[InformedRegion] = None) -> float:
        p_lo, p_hi, q_lo, q_hi = self.sampling_box(region)
        return max(p_hi - p_lo, 0.0) * max(q_hi - q_lo, 0.0)

    def sample(self, n: int, region: Optional[InformedRegion] = None) -> List[CurvilinearPoint]:
        p, q = self.sample_arrays(n, region)
        return [CurvilinearPoint(float(a), float(b)) for a, b in zip(p, q)]

    def sample_arrays(self, n: int, region: Optional[InformedRegion] = None):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        p_lo, p_hi, q_lo, q_hi = self.sampling_box(region)
        if p_hi <= p_lo or q_hi < q_lo:
            warnings.warn("sampling region has zero extent; no samples drawn", SamplingWarning, stacklevel=2)
            return np.empty(0), np.empty(0)
        out_p: List[np.ndarray] = []
        out_q: List[np.ndarray] = []
        have = 0
        budget = n * self.max_attempts_factor
        while have < n and budget > 0:
            k = min(max(2 * (n - have), 16), budget)
            budget -= k
            ps = self.rng.uniform(p_lo, p_hi, k)
            qs = self.rng.uniform(q_lo, q_hi, k) if q_hi > q_lo else np.full(k, q_lo)
            self.attempts += k
            ok = self._accept(ps, qs, region)
            ps, qs = ps[ok], qs[ok]
            out_p.append(ps)
            out_q.append(qs)
            have += ps.size
        p_all = np.concatenate(out_p)[:n]
        q_all = np.concatenate(out_q)[:n]
        self.accepted += p_all.size
        if p_all.size < n:
            warnings.warn(f"only {p_all.size} of {n} samples accepted", SamplingWarning, stacklevel=2)
        return p_all, q_all

    def _accept(self, ps: np.ndarray, qs: np.ndarray, region: Optional[InformedRegion]) -> np.ndarray:
        lo, hi = self.path.q_limits(ps)
        ok = (qs >= lo) & (qs <= hi)
        if region is not None and self.reject_f_hat:
            ok &= f_hat_array(region, ps, qs) <= region.c_best
        if self.grid is not None and ok.any():
            idx = np.nonzero(ok)[0]
            xs, ys = self.path.pq_to_xy_array(ps[idx], qs[idx])
            ok[idx[self.grid.occupied_at(xs, ys)]] = False
        return ok


def sample_free(
    region: Optional[InformedRegion],
    grid: Optional[OccupancyGrid],
    path: ReferencePath,
    n: int,
    rng_seed: int = 0,
    reject_f_hat: bool = True,
) -> List[CurvilinearPoint]:
    """One-shot sampling helper; ``region=None`` samples the whole corridor."""
    return InformedSampler(path, grid, rng_seed, reject_f_hat).sample(n, region)
