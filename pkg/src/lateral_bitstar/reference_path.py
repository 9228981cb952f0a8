"""Taught reference path and the curvilinear (p, q) <-> Euclidean (x, y) map.

The longitudinal coordinate ``p`` accumulates a yaw-regularised distance
between consecutive poses, so rotations on the spot still advance ``p``.
The lateral coordinate ``q`` is the signed offset perpendicular to the
interpolated heading, positive to the left of the direction of travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi

DEFAULT_YAW_WEIGHT = 0.1
# tangential residual treated as zero when projecting onto the path
_FOOT_TOL = 1e-10


class PathConstructionError(ValueError):
    """Raised when a reference path cannot be built from the given poses."""


class DegenerateSegmentError(PathConstructionError):
    """Two consecutive poses produce a zero-length step in ``p``."""


class PathDomainError(ValueError):
    """A longitudinal coordinate lies outside ``[0, p_len]``."""


class OutOfCorridorError(ValueError):
    """A Euclidean point projects outside the lateral bounds of the corridor."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    psi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", wrap_angle(float(self.psi)))


@dataclass(frozen=True)
class CurvilinearPoint:
    p: float
    q: float

    def as_tuple(self) -> Tuple[float, float]:
        return (self.p, self.q)


def segment_length(a: Pose, b: Pose, yaw_weight: float) -> float:
    """Yaw-regularised distance between two consecutive poses."""
    dpsi = wrap_angle(b.psi - a.psi)
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + yaw_weight * dpsi * dpsi)


class ReferencePath:
    """Immutable chain of poses with cumulative longitudinal distance.

    Use :func:`build_reference_path` to construct one; it validates the input.
    """

    __slots__ = ("poses", "cum_p", "yaw_weight", "q_bounds", "_x", "_y", "_psi", "_dpsi", "_dp")

    def __init__(self, poses: Sequence[Pose], cum_p: np.ndarray, yaw_weight: float, q_bounds: np.ndarray):
        self.poses: Tuple[Pose, ...] = tuple(poses)
        self.cum_p = cum_p
        self.yaw_weight = float(yaw_weight)
        self.q_bounds = q_bounds
        self._x = np.array([pose.x for pose in self.poses])
        self._y = np.array([pose.y for pose in self.poses])
        self._psi = np.array([pose.psi for pose in self.poses])
        self._dpsi = np.array([wrap_angle(b.psi - a.psi) for a, b in zip(self.poses[:-1], self.poses[1:])])
        self._dp = np.diff(cum_p)
        for arr in (self.cum_p, self.q_bounds, self._x, self._y, self._psi, self._dpsi, self._dp):
            arr.setflags(write=False)

    def __repr__(self) -> str:
        return f"ReferencePath(n_poses={len(self.poses)}, p_len={self.p_len:.4f}, a={self.yaw_weight})"

    @property
    def p_len(self) -> float:
        return float(self.cum_p[-1])

    @property
    def n_segments(self) -> int:
        return len(self.poses) - 1

    @property
    def q_min(self) -> float:
        """Smallest lateral bound over all segments."""
        return float(self.q_bounds[:, 0].min())

    @property
    def q_max(self) -> float:
        return float(self.q_bounds[:, 1].max())

    def segment_index(self, p):
        """Index of the segment containing ``p`` (vectorised)."""
        idx = np.searchsorted(self.cum_p, p, side="right") - 1
        return np.clip(idx, 0, self.n_segments - 1)

    def _check_domain(self, p) -> None:
        p_arr = np.asarray(p, dtype=float)
        if not np.all(np.isfinite(p_arr)) or np.any(p_arr < 0.0) or np.any(p_arr > self.p_len):
            raise PathDomainError(f"p outside [0, {self.p_len}]")

    def q_limits(self, p):
        """Lateral bounds ``(q_min, q_max)`` of the segment containing ``p``."""
        idx = self.segment_index(p)
        return self.q_bounds[idx, 0], self.q_bounds[idx, 1]

    def interpolate(self, p):
        """On-path pose ``(x, y, psi)`` at longitudinal coordinate ``p``."""
        self._check_domain(p)
        idx = self.segment_index(p)
        t = (np.asarray(p, dtype=float) - self.cum_p[idx]) / self._dp[idx]
        x = self._x[idx] + t * (self._x[idx + 1] - self._x[idx])
        y = self._y[idx] + t * (self._y[idx + 1] - self._y[idx])
        psi = self._psi[idx] + t * self._dpsi[idx]
        return x, y, psi

    def yaw_at(self, p):
        _, _, psi = self.interpolate(p)
        return np.vectorize(wrap_angle)(psi) if np.ndim(psi) else wrap_angle(float(psi))

    def pq_to_xy_array(self, p, q) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorised curvilinear to Euclidean map."""
        x_p, y_p, psi = self.interpolate(p)
        q = np.asarray(q, dtype=float)
        return x_p - q * np.sin(psi), y_p + q * np.cos(psi)

    def pq_to_xy(self, pt) -> Tuple[float, float]:
        p, q = _unpack(pt)
        x, y = self.pq_to_xy_array(p, q)
        return float(x), float(y)

    def xy_to_pq(self, x: float, y: float, check_bounds: bool = True) -> CurvilinearPoint:
        """Project a Euclidean point onto the path.

        Among equally near candidates (e.g. where the corridor overlaps itself)
        the smallest ``p`` wins.
        """
        candidates = self._projection_candidates(float(x), float(y))
        if not candidates:
            raise OutOfCorridorError(f"({x}, {y}) has no projection onto the path")
        best_dist = min(abs(c[1]) for c in candidates)
        tol = 1e-9 * max(1.0, best_dist)
        p, q, seg = min((c for c in candidates if abs(c[1]) <= best_dist + tol), key=lambda c: c[0])
        if check_bounds:
            lo, hi = self.q_bounds[seg]
            if q < lo - 1e-9 or q > hi + 1e-9:
                raise OutOfCorridorError(f"({x}, {y}) projects to q={q:.4f}, outside [{lo}, {hi}]")
        return CurvilinearPoint(p, q)

    def _projection_candidates(self, x: float, y: float):
        # f_i(t) = <X - c_i(t), tangent(psi_i(t))>; a root means X lies on the normal at t.
        dx0 = x - self._x[:-1]
        dy0 = y - self._y[:-1]
        dx1 = x - self._x[1:]
        dy1 = y - self._y[1:]
        psi0 = self._psi[:-1]
        psi1 = self._psi[:-1] + self._dpsi
        f0 = dx0 * np.cos(psi0) + dy0 * np.sin(psi0)
        f1 = dx1 * np.cos(psi1) + dy1 * np.sin(psi1)
        tol = _FOOT_TOL
        segs = np.nonzero((f0 >= -tol) & (f1 <= tol) | (f0 <= tol) & (f1 >= -tol))[0]
        if segs.size == 0:
            return []
        # Rough lateral distance at the linearised root, used to discard far branches.
        denom = f0[segs] - f1[segs]
        t_lin = np.where(np.abs(denom) > 0, f0[segs] / np.where(denom == 0, 1.0, denom), 0.0)
        t_lin = np.clip(t_lin, 0.0, 1.0)
        cx = self._x[segs] + t_lin * (self._x[segs + 1] - self._x[segs])
        cy = self._y[segs] + t_lin * (self._y[segs + 1] - self._y[segs])
        rough = np.hypot(x - cx, y - cy)
        slack = float(np.max(np.hypot(np.diff(self._x), np.diff(self._y)))) + 1e-6
        keep = segs[rough <= rough.min() + 2.0 * slack]
        out = []
        for i in keep:
            t = self._solve_foot(int(i), x, y)
            if t is None:
                continue
            p = float(self.cum_p[i] + t * self._dp[i])
            px = self._x[i] + t * (self._x[i + 1] - self._x[i])
            py = self._y[i] + t * (self._y[i + 1] - self._y[i])
            psi = self._psi[i] + t * self._dpsi[i]
            q = -(x - px) * math.sin(psi) + (y - py) * math.cos(psi)
            resid = (x - px) * math.cos(psi) + (y - py) * math.sin(psi)
            if abs(resid) > 1e-7:
                continue
            out.append((min(max(p, 0.0), self.p_len), float(q), int(i)))
        return out

    def _solve_foot(self, i: int, x: float, y: float):
        x0, y0 = self._x[i], self._y[i]
        ex, ey = self._x[i + 1] - x0, self._y[i + 1] - y0
        psi0, dpsi = self._psi[i], self._dpsi[i]

        def f(t: float) -> float:
            psi = psi0 + t * dpsi
            return (x - x0 - t * ex) * math.cos(psi) + (y - y0 - t * ey) * math.sin(psi)

        fa, fb = f(0.0), f(1.0)
        if abs(fa) <= _FOOT_TOL:
            return 0.0
        if abs(fb) <= _FOOT_TOL:
            return 1.0
        if fa * fb > 0.0:
            return None
        if dpsi == 0.0:
            return fa / (fa - fb)
        return brentq(f, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _unpack(pt) -> Tuple[float, float]:
    if isinstance(pt, CurvilinearPoint):
        return pt.p, pt.q
    p, q = pt
    return float(p), float(q)


def build_reference_path(
    poses: Iterable,
    a: float = DEFAULT_YAW_WEIGHT,
    q_bounds=(-2.0, 2.0),
) -> ReferencePath:
    """Build a :class:`ReferencePath` from an ordered sequence of poses.

    ``poses`` may hold :class:`Pose` objects or ``(x, y, psi)`` triples.
    ``q_bounds`` is either one ``(q_min, q_max)`` pair used for every segment
    or a sequence with one pair per segment.
    """
    pose_list = [pose if isinstance(pose, Pose) else Pose(*pose) for pose in poses]
    if len(pose_list) < 2:
        raise PathConstructionError("a reference path needs at least 2 poses")
    if not math.isfinite(a) or a < 0.0:
        raise PathConstructionError(f"yaw weight a must be finite and >= 0, got {a}")
    for k, pose in enumerate(pose_list):
        if not all(math.isfinite(v) for v in (pose.x, pose.y, pose.psi)):
            raise PathConstructionError(f"pose {k} has non-finite coordinates")

    steps = np.array([segment_length(u, v, a) for u, v in zip(pose_list[:-1], pose_list[1:])])
    bad = np.nonzero(steps <= 0.0)[0]
    if bad.size:
        raise DegenerateSegmentError(f"poses {bad[0]} and {bad[0] + 1} give a zero-length step")
    cum_p = np.concatenate(([0.0], np.cumsum(steps)))

    bounds = np.asarray(q_bounds, dtype=float)
    n_seg = len(pose_list) - 1
    if bounds.shape == (2,):
        bounds = np.tile(bounds, (n_seg, 1))
    if bounds.shape != (n_seg, 2):
        raise PathConstructionError(f"q_bounds must be one pair or {n_seg} pairs, got shape {bounds.shape}")
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 0] > 0.0) or np.any(bounds[:, 1] < 0.0):
        raise PathConstructionError("every segment needs q_min <= 0 <= q_max")
    return ReferencePath(pose_list, cum_p, a, bounds.copy())
