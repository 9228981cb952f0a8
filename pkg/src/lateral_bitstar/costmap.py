"""Occupancy grid holding inflated obstacles, queried in Euclidean space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from .reference_path import CurvilinearPoint, ReferencePath

DEFAULT_RESOLUTION = 0.1
DEFAULT_INFLATION = 0.3
DEFAULT_COLLISION_STEP = 0.2


class CostmapParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Circle:
    center: Tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise CostmapParameterError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by its lower-left and upper-right corners."""

    lo: Tuple[float, float]
    hi: Tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.hi[0] > self.lo[0] and self.hi[1] > self.lo[1]):
            raise CostmapParameterError(f"box needs hi > lo on both axes, got {self.lo}, {self.hi}")


Shape = Union[Circle, Box]


class OccupancyGrid:
    """2D occupancy grid; row index grows with y, column index with x.

    Inserted shapes mark seed cells. The inflated layer is rebuilt lazily on
    the first query after a mutation, or eagerly by :meth:`freeze`.
    """

    def __init__(
        self,
        origin: Tuple[float, float] = (0.0, 0.0),
        resolution: float = DEFAULT_RESOLUTION,
        width: int = 100,
        height: int = 100,
        inflation_radius: float = DEFAULT_INFLATION,
    ):
        if not resolution > 0.0:
            raise CostmapParameterError(f"resolution must be positive, got {resolution}")
        if int(width) < 1 or int(height) < 1:
            raise CostmapParameterError("grid width and height must be at least 1")
        if not inflation_radius >= 0.0:
            raise CostmapParameterError(f"inflation radius must be >= 0, got {inflation_radius}")
        self.origin = (float(origin[0]), float(origin[1]))
        self.resolution = float(resolution)
        self.width = int(width)
        self.height = int(height)
        self.inflation_radius = float(inflation_radius)
        self.seeds = np.zeros((self.height, self.width), dtype=bool)
        self._inflated: Optional[np.ndarray] = None
        self._frozen = False
        self.version = 0

    @classmethod
    def from_extent(cls, x_range, y_range, resolution=DEFAULT_RESOLUTION, inflation_radius=DEFAULT_INFLATION):
        width = max(1, int(math.ceil((x_range[1] - x_range[0]) / resolution - 1e-9)))
        height = max(1, int(math.ceil((y_range[1] - y_range[0]) / resolution - 1e-9)))
        return cls((x_range[0], y_range[0]), resolution, width, height, inflation_radius)

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = self.origin[0] + (np.arange(self.width) + 0.5) * self.resolution
        ys = self.origin[1] + (np.arange(self.height) + 0.5) * self.resolution
        return xs, ys

    @property
    def occupied(self) -> np.ndarray:
        """Inflated occupancy layer (rebuilt on demand)."""
        if self._inflated is None:
            self._inflated = self._inflate()
        return self._inflated

    def _inflate(self) -> np.ndarray:
        if not self.seeds.any():
            return self.seeds.copy()
        r_cells = self.inflation_radius / self.resolution
        if r_cells <= 0.0:
            return self.seeds.copy()
        dist = ndimage.distance_transform_edt(~self.seeds)
        return dist <= r_cells + 1e-9

    def insert(self, shape: Shape) -> "OccupancyGrid":
        if self._frozen:
            raise RuntimeError("grid is frozen; copy it before inserting obstacles")
        xs, ys = self.cell_centers()
        if isinstance(shape, Circle):
            cx, cy = shape.center
            mask = (xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2 <= shape.radius**2
        elif isinstance(shape, Box):
            mask = ((xs[None, :] >= shape.lo[0]) & (xs[None, :] <= shape.hi[0])) & (
                (ys[:, None] >= shape.lo[1]) & (ys[:, None] <= shape.hi[1])
            )
        else:
            raise TypeError(f"unsupported shape {shape!r}")
        if mask.any():
            self.seeds |= mask
            self._inflated = None
            self.version += 1
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "OccupancyGrid":
        """Build the inflated layer and forbid further mutation."""
        self.occupied.setflags(write=False)
        self._frozen = True
        return self

    def copy(self) -> "OccupancyGrid":
        other = OccupancyGrid(self.origin, self.resolution, self.width, self.height, self.inflation_radius)
        other.seeds = self.seeds.copy()
        other.version = self.version
        return other

    def occupied_at(self, x, y) -> np.ndarray:
        """Vectorised occupancy query; points off the grid count as free."""
        col = np.floor((np.asarray(x, dtype=float) - self.origin[0]) / self.resolution)
        row = np.floor((np.asarray(y, dtype=float) - self.origin[1]) / self.resolution)
        inside = (col >= 0) & (col < self.width) & (row >= 0) & (row < self.height)
        out = np.zeros(np.shape(inside), dtype=bool)
        if np.any(inside):
            grid = self.occupied
            out[inside] = grid[row[inside].astype(np.intp), col[inside].astype(np.intp)]
        return out

    def is_occupied(self, x: float, y: float) -> bool:
        return bool(self.occupied_at(x, y))

    def to_pgm(self, path: Union[str, Path]) -> Path:
        """Write the inflated layer as a binary PGM (255 free, 0 occupied, top row = max y)."""
        path = Path(path)
        img = np.where(self.occupied[::-1], 0, 255).astype(np.uint8)
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        path.write_bytes(header + img.tobytes())
        return path


def insert_obstacle(grid: OccupancyGrid, shape: Shape) -> OccupancyGrid:
    return grid.insert(shape)


def is_occupied(grid: OccupancyGrid, x: float, y: float) -> bool:
    return grid.is_occupied(x, y)


def discretize_edge(a: CurvilinearPoint, b: CurvilinearPoint, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Points along the straight (p, q) segment a->b, spaced at most ``step`` apart."""
    if not step > 0.0:
        raise CostmapParameterError(f"collision step must be positive, got {step}")
    length = math.hypot(b.p - a.p, b.q - a.q)
    n = max(1, int(math.ceil(length / step - 1e-12)))
    t = np.linspace(0.0, 1.0, n + 1)
    return a.p + t * (b.p - a.p), a.q + t * (b.q - a.q)


def edge_collides(
    grid: OccupancyGrid,
    path: ReferencePath,
    a: CurvilinearPoint,
    b: CurvilinearPoint,
    step: float = DEFAULT_COLLISION_STEP,
) -> bool:
    """True iff any discretised point of the (p, q) edge maps into an occupied cell."""
    ps, qs = discretize_edge(a, b, step)
    xs, ys = path.pq_to_xy_array(ps, qs)
    return bool(grid.occupied_at(xs, ys).any())
