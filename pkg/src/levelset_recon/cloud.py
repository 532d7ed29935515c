"""Point cloud container."""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .grid import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointCloud:
    """Unorganized points in grid coordinates, stored as an ``(n, ndim)`` array."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("Point cloud must be a nonempty (n, ndim) array")
        if pts.shape[1] not in (2, 3):
            raise ValueError(f"Points must have 2 or 3 coordinates, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("Point cloud contains non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points: Union[np.ndarray, Iterable[Sequence[float]]]) -> "PointCloud":
        return cls(np.asarray(list(points) if not isinstance(points, np.ndarray) else points))

    @property
    def ndim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def validate_for(self, grid: Grid) -> None:
        """
        Check the cloud against a grid.

        Raises:
            ValueError: On a dimension mismatch or a point outside the box
        """
        if self.ndim != grid.ndim:
            raise ValueError(f"Cloud is {self.ndim}D but grid is {grid.ndim}D")
        outside = ~grid.contains(self.points)
        if np.any(outside):
            first = self.points[np.argmax(outside)]
            raise ValueError(f"{int(outside.sum())} points lie outside grid {grid.dims}, e.g. {first.tolist()}")

    def merged(self, other: "PointCloud") -> "PointCloud":
        return PointCloud(np.vstack([self.points, other.points]))

    def translated(self, offset: Sequence[float]) -> "PointCloud":
        return PointCloud(self.points + np.asarray(offset, dtype=np.float64))
