"""Uniform Cartesian grid and periodic finite-difference operators."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

GRADIENT_FLOOR = 1e-8

# Fields are plain float64 arrays: a scalar field has shape ``grid.dims`` and a
# vector field has shape ``(ndim, *grid.dims)``; axis 0 is x.


@dataclass(frozen=True)
class Grid:
    """Lattice with unit spacing on every axis."""

    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        if len(dims) not in (2, 3):
            raise ValueError(f"Grid must have 2 or 3 axes, got {len(dims)}")
        if any(n < 4 for n in dims):
            raise ValueError(f"Every grid dimension must be >= 4, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def spacing(self) -> float:
        return 1.0

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def diameter(self) -> float:
        """Length of the box diagonal, node 0 to node N-1 on every axis."""
        return float(np.sqrt(sum((n - 1) ** 2 for n in self.dims)))

    @property
    def center(self) -> Tuple[float, ...]:
        return tuple((n - 1) / 2.0 for n in self.dims)

    def coordinates(self) -> np.ndarray:
        """Node coordinates stacked as ``(ndim, *dims)``."""
        axes = [np.arange(n, dtype=np.float64) for n in self.dims]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.dims, dtype=np.float64)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Mask of points lying inside the closed bounding box."""
        upper = np.asarray(self.dims, dtype=np.float64) - 1.0
        return np.all((points >= 0.0) & (points <= upper), axis=1)

    def check(self, field: np.ndarray, vector: bool = False) -> np.ndarray:
        """
        Validate that an array is a field on this grid.

        Args:
            field: Array to check
            vector: Expect a vector field of shape ``(ndim, *dims)``

        Returns:
            The field as a float64 array

        Raises:
            ValueError: On a shape mismatch
        """
        arr = np.asarray(field, dtype=np.float64)
        expected = (self.ndim, *self.dims) if vector else self.dims
        if arr.shape != expected:
            raise ValueError(f"Field shape {arr.shape} does not match grid {expected}")
        return arr

    @classmethod
    def like(cls, field: np.ndarray) -> "Grid":
        return cls(tuple(np.shape(field)))


def _check_axis(u: np.ndarray, axis: int) -> None:
    if not 0 <= axis < u.ndim:
        raise ValueError(f"axis {axis} out of range for a {u.ndim}-axis field")


def backward_diff(u: np.ndarray, axis: int) -> np.ndarray:
    """u[i] - u[i-1] with the first node reading the last one."""
    _check_axis(u, axis)
    return u - np.roll(u, 1, axis=axis)


def forward_diff(u: np.ndarray, axis: int) -> np.ndarray:
    """u[i+1] - u[i] with the last node reading the first one."""
    _check_axis(u, axis)
    return np.roll(u, -1, axis=axis) - u


def gradient(u: np.ndarray) -> np.ndarray:
    """Centered gradient: per axis the mean of forward and backward differences."""
    return np.stack([0.5 * (np.roll(u, -1, axis=k) - np.roll(u, 1, axis=k)) for k in range(u.ndim)])


def divergence(v: np.ndarray) -> np.ndarray:
    """Centered divergence of a vector field shaped ``(ndim, *dims)``."""
    ndim = v.shape[0]
    if v.ndim != ndim + 1:
        raise ValueError(f"Vector field with {ndim} components must have {ndim} spatial axes")
    out = np.zeros(v.shape[1:], dtype=np.float64)
    for k in range(ndim):
        out += 0.5 * (np.roll(v[k], -1, axis=k) - np.roll(v[k], 1, axis=k))
    return out


def laplacian(u: np.ndarray) -> np.ndarray:
    """Periodic 5-point (7-point in 3D) Laplacian, sum of forward minus backward."""
    out = -2.0 * u.ndim * u
    for k in range(u.ndim):
        out = out + np.roll(u, -1, axis=k) + np.roll(u, 1, axis=k)
    return out


def wide_laplacian(u: np.ndarray) -> np.ndarray:
    """Spacing-2 Laplacian, the exact composition of divergence and gradient."""
    out = -0.5 * u.ndim * u
    for k in range(u.ndim):
        out = out + 0.25 * (np.roll(u, -2, axis=k) + np.roll(u, 2, axis=k))
    return out


def gradient_magnitude(u: np.ndarray) -> np.ndarray:
    g = gradient(u)
    return np.sqrt(np.sum(g * g, axis=0))


def vector_norm(v: np.ndarray) -> np.ndarray:
    """Pointwise Euclidean length of a vector field."""
    return np.sqrt(np.sum(v * v, axis=0))
