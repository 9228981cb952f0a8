"""Seeded generators for the shipped benchmark scenarios."""

from __future__ import annotations

import math
from pathlib import Path
from typing import List

import numpy as np

from .scenario import CircleSpec, GridSpec, PlannerSpec, Scenario, save_scenario

STRAIGHT_LENGTH = 15.0
SUITE_SEED = 20230117


def straight_poses(length: float = STRAIGHT_LENGTH, spacing: float = 0.5):
    n = int(round(length / spacing))
    return [(round(k * length / n, 9), 0.0, 0.0) for k in range(n + 1)]


def straight_grid(length: float = STRAIGHT_LENGTH, half_width: float = 4.0) -> GridSpec:
    res = 0.1
    return GridSpec(
        origin=(-1.0, -half_width),
        resolution=res,
        width=int(round((length + 2.0) / res)),
        height=int(round(2 * half_width / res)),
        inflation_radius=0.3,
    )


def clipping_obstacles(rng: np.random.Generator, n: int, length: float = STRAIGHT_LENGTH) -> List[CircleSpec]:
    """``n`` discs of diameter 0.4-1.8 m that each cut into the path from one side.

    Discs are spread along the path at least 4 m apart and all sit on the same
    side, so every one forces a shallow detour of roughly 0.3-0.5 m once the
    0.3 m inflation is applied.
    """
    while True:
        centers = np.sort(rng.uniform(3.0, length - 3.0, n))
        if n == 1 or np.min(np.diff(centers)) >= 4.0:
            break
    side = rng.choice([-1.0, 1.0])
    out = []
    for pc in centers:
        diameter = rng.uniform(0.4, 1.8)
        r = diameter / 2.0
        offset = r - rng.uniform(0.02, min(0.2, r))
        out.append(CircleSpec(center=(round(float(pc), 3), round(float(side * offset), 3)), radius=round(float(r), 3)))
    return out


def straight_suite(seed: int = SUITE_SEED, n_scenarios: int = 10) -> List[Scenario]:
    rng = np.random.default_rng(seed)
    scenarios = []
    for k in range(n_scenarios):
        n_obs = int(rng.integers(1, 4))
        scenarios.append(
            Scenario(
                name=f"straight_{k + 1:02d}",
                description=f"15 m straight reference with {n_obs} clipping obstacle(s)",
                poses=straight_poses(),
                yaw_weight=0.1,
                q_bounds=(-2.0, 2.0),
                obstacles=clipping_obstacles(rng, n_obs),
                grid=straight_grid(),
                planner=PlannerSpec(),
            )
        )
    return scenarios


def obstacle_free_scenario() -> Scenario:
    return Scenario(
        name="straight_free",
        description="15 m straight reference, no obstacles",
        poses=straight_poses(),
        q_bounds=(-2.0, 2.0),
        grid=straight_grid(),
        planner=PlannerSpec(max_batches=20),
    )


def lemniscate_poses(scale: float = 10.0, n: int = 400, trim: float = 0.35):
    """Self-crossing figure-eight (lemniscate of Bernoulli), open near one lobe tip."""
    t = np.linspace(trim, 2.0 * math.pi - trim, n)
    s, c = np.sin(t), np.cos(t)
    den = 1.0 + s * s
    x = scale * c / den
    y = scale * s * c / den
    psi = np.unwrap(np.arctan2(np.gradient(y), np.gradient(x)))
    return [(round(float(a), 6), round(float(b), 6), round(float(math.remainder(h, 2 * math.pi)), 6)) for a, b, h in zip(x, y, psi)]


def complex_scenario() -> Scenario:
    poses = lemniscate_poses()
    from ..reference_path import build_reference_path

    path = build_reference_path(poses, 0.1, (-1.5, 1.5))
    # Discs sit on the path at evenly spread p, alternating sides.
    obstacles = []
    for k, frac in enumerate((0.12, 0.27, 0.42, 0.58, 0.73, 0.88)):
        r = (0.3, 0.5, 0.4, 0.6, 0.35, 0.45)[k]
        side = 1.0 if k % 2 == 0 else -1.0
        x, y = path.pq_to_xy((frac * path.p_len, side * (r - 0.1)))
        obstacles.append(CircleSpec(center=(round(x, 3), round(y, 3)), radius=r))
    xs = [p[0] for p in poses]
    ys = [p[1] for p in poses]
    margin = 2.5
    grid = GridSpec(
        origin=(round(min(xs) - margin, 1), round(min(ys) - margin, 1)),
        resolution=0.1,
        width=int(math.ceil((max(xs) - min(xs) + 2 * margin) / 0.1)),
        height=int(math.ceil((max(ys) - min(ys) + 2 * margin) / 0.1)),
        inflation_radius=0.3,
    )
    return Scenario(
        name="lemniscate",
        description="curved self-crossing reference with six obstacles",
        poses=poses,
        yaw_weight=0.1,
        q_bounds=(-1.5, 1.5),
        obstacles=obstacles,
        grid=grid,
        planner=PlannerSpec(max_batches=15, seeds=[0]),
    )


def write_shipped(root) -> List[Path]:
    """Regenerate every shipped scenario file under ``root``."""
    root = Path(root)
    written = []
    (root / "suite").mkdir(parents=True, exist_ok=True)
    for sc in straight_suite():
        written.append(save_scenario(sc, root / "suite" / f"{sc.name}.json"))
    written.append(save_scenario(obstacle_free_scenario(), root / "straight_free.json"))
    written.append(save_scenario(complex_scenario(), root / "lemniscate.json"))
    return written
