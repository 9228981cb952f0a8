"""Laterally weighted edge cost in curvilinear space.

The cost of a straight (p, q) edge is the line integral of ``1 + alpha q^2``
over arc length. Setting ``alpha = 0`` recovers plain Euclidean length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_ALPHA = 0.5
# Below this |dq| the cubic-difference ratio is replaced by its limit.
DQ_EPS = 1e-9


class MetricParameterError(ValueError):
    pass


@dataclass(frozen=True)
class MetricConfig:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise MetricParameterError(f"alpha must be finite and >= 0, got {self.alpha}")


def _coords(pt):
    return (pt.p, pt.q) if hasattr(pt, "p") else (pt[0], pt[1])


def lateral_factor(alpha: float, qa: float, qb: float) -> float:
    """Mean of ``1 + alpha q^2`` over the straight edge between heights qa and qb."""
    dq = qb - qa
    if abs(dq) < DQ_EPS:
        q = 0.5 * (qa + qb)
        return 1.0 + alpha * q * q
    # (qb^3 - qa^3) / (3 dq) expanded to avoid cancellation
    return 1.0 + alpha * (qa * qa + qa * qb + qb * qb) / 3.0


def weighted_cost(alpha: float, pa: float, qa: float, pb: float, qb: float) -> float:
    """Scalar fast path of :func:`edge_cost` used inside the planner loop."""
    length = math.hypot(pb - pa, qb - qa)
    if alpha == 0.0:
        return length
    return lateral_factor(alpha, qa, qb) * length


def edge_cost(cfg: MetricConfig, a, b) -> float:
    pa, qa = _coords(a)
    pb, qb = _coords(b)
    if not all(math.isfinite(v) for v in (pa, qa, pb, qb)):
        raise MetricParameterError("edge endpoints must be finite")
    return weighted_cost(cfg.alpha, pa, qa, pb, qb)


def heuristic_edge_cost(cfg: MetricConfig, a, b) -> float:
    """Euclidean (p, q) distance; a lower bound on the weighted cost of any path a->b."""
    pa, qa = _coords(a)
    pb, qb = _coords(b)
    return math.hypot(pb - pa, qb - qa)


def edge_cost_quadrature(cfg: MetricConfig, a, b, n_points: int = 64) -> float:
    """Gauss-Legendre evaluation of the weighted line integral (test oracle).

    Integrates ``(1 + alpha q(s)^2) ds`` directly along the segment rather than
    via the closed form, so it can cross-check :func:`edge_cost`.
    """
    if int(n_points) < 2:
        raise MetricParameterError(f"n_points must be >= 2, got {n_points}")
    pa, qa = _coords(a)
    pb, qb = _coords(b)
    length = math.hypot(pb - pa, qb - qa)
    if length == 0.0:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(int(n_points))
    t = 0.5 * (nodes + 1.0)
    q = qa + t * (qb - qa)
    integrand = 1.0 + cfg.alpha * q * q
    return float(0.5 * length * np.dot(weights, integrand))
