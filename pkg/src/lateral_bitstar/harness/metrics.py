"""Path-deviation metrics of a planned Euclidean polyline against the reference."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..reference_path import ReferencePath, wrap_angle

RESAMPLE_SPACING = 0.05


class CoverageError(ValueError):
    """The solution does not span the requested reference segment."""


@dataclass(frozen=True)
class DeviationProfile:
    p: np.ndarray
    lateral: np.ndarray
    heading_error: np.ndarray

    @property
    def trans_rmse(self) -> float:
        return float(np.sqrt(np.mean(self.lateral**2)))

    @property
    def rot_rmse(self) -> float:
        return float(np.sqrt(np.mean(self.heading_error**2)))

    @property
    def max_lateral_deviation(self) -> float:
        return float(np.max(np.abs(self.lateral)))


def resample_polyline(points: Sequence[Tuple[float, float]], spacing: float = RESAMPLE_SPACING):
    """Points at fixed arc-length intervals along a polyline, with tangent headings."""
    pts = np.asarray(points, dtype=float)
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    keep = seg_len > 1e-12
    pts = np.vstack((pts[:1], pts[1:][keep]))
    seg, seg_len = seg[keep], seg_len[keep]
    if seg_len.size == 0:
        raise CoverageError("solution polyline has zero length")
    s = np.concatenate(([0.0], np.cumsum(seg_len)))
    n = int(math.floor(s[-1] / spacing + 1e-9))
    s_new = np.append(np.arange(n + 1) * spacing, s[-1]) if s[-1] - n * spacing > 1e-9 else np.arange(n + 1) * spacing
    idx = np.clip(np.searchsorted(s, s_new, side="right") - 1, 0, seg_len.size - 1)
    t = (s_new - s[idx]) / seg_len[idx]
    xy = pts[idx] + t[:, None] * seg[idx]
    heading = np.arctan2(seg[idx, 1], seg[idx, 0])
    return xy, heading


def deviation_profile(
    solution_xy: Sequence[Tuple[float, float]],
    path: ReferencePath,
    segment: Optional[Tuple[float, float]] = None,
    spacing: float = RESAMPLE_SPACING,
) -> DeviationProfile:
    p_lo, p_hi = (0.0, path.p_len) if segment is None else segment
    xy, heading = resample_polyline(solution_xy, spacing)
    ps, qs, errs = [], [], []
    for (x, y), h in zip(xy, heading):
        pt = path.xy_to_pq(x, y, check_bounds=False)
        if p_lo - 1e-9 <= pt.p <= p_hi + 1e-9:
            ps.append(pt.p)
            qs.append(pt.q)
            errs.append(wrap_angle(h - float(path.yaw_at(pt.p))))
    tol = max(2.0 * spacing, 1e-6)
    if not ps or min(ps) > p_lo + tol or max(ps) < p_hi - tol:
        raise CoverageError(f"solution does not cover reference segment [{p_lo}, {p_hi}]")
    return DeviationProfile(np.array(ps), np.array(qs), np.array(errs))


def compute_rmse(
    solution_xy: Sequence[Tuple[float, float]],
    path: ReferencePath,
    segment: Optional[Tuple[float, float]] = None,
    spacing: float = RESAMPLE_SPACING,
) -> Tuple[float, float]:
    """Translation and rotation RMSE of the solution over a reference segment."""
    prof = deviation_profile(solution_xy, path, segment, spacing)
    return prof.trans_rmse, prof.rot_rmse


@dataclass
class RunResult:
    scenario: str
    mode: str
    seed: int
    solved: bool
    cost: float = math.nan
    trans_rmse: float = math.nan
    rot_rmse: float = math.nan
    max_lateral_deviation: float = math.nan
    n_batches: int = 0
    n_waypoints: int = 0
    first_solution_ms: float = math.nan
    segments: List[Tuple[float, float, float, float]] = field(default_factory=list)
    cost_history: List[Tuple[float, float]] = field(default_factory=list)


@dataclass
class MetricsReport:
    """Per-seed results of one scenario in one mode, with seed aggregates."""

    scenario: str
    mode: str
    runs: List[RunResult]

    def _solved(self, attr: str) -> np.ndarray:
        return np.array([getattr(r, attr) for r in self.runs if r.solved], dtype=float)

    def mean(self, attr: str) -> float:
        vals = self._solved(attr)
        return float(vals.mean()) if vals.size else math.nan

    def std(self, attr: str) -> float:
        vals = self._solved(attr)
        return float(vals.std()) if vals.size else math.nan

    @property
    def trans_rmse(self) -> float:
        return self.mean("trans_rmse")

    @property
    def rot_rmse(self) -> float:
        return self.mean("rot_rmse")

    @property
    def max_lateral_deviation(self) -> float:
        vals = self._solved("max_lateral_deviation")
        return float(vals.max()) if vals.size else math.nan

    @property
    def first_solution_ms(self) -> float:
        return self.mean("first_solution_ms")

    @property
    def all_solved(self) -> bool:
        return all(r.solved for r in self.runs)
