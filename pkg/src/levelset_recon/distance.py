"""Unsigned distance to a point cloud via Lax-Friedrichs fast sweeping."""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy.spatial.distance import cdist

from .cloud import PointCloud
from .errors import NumericalFailure
from .grid import Grid

logger = logging.getLogger(__name__)

SWEEP_TOLERANCE = 1e-6
MAX_SWEEP_CYCLES = 500


@njit(cache=True)
def _sweep_cycle_2d(d: np.ndarray, frozen: np.ndarray) -> float:
    nx, ny = d.shape
    max_change = 0.0
    for order in range(4):
        flip_x = order & 1
        flip_y = (order >> 1) & 1
        for ii in range(nx):
            i = nx - 1 - ii if flip_x else ii
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            for jj in range(ny):
                j = ny - 1 - jj if flip_y else jj
                if frozen[i, j]:
                    continue
                jm = max(j - 1, 0)
                jp = min(j + 1, ny - 1)
                gx = 0.5 * (d[ip, j] - d[im, j])
                gy = 0.5 * (d[i, jp] - d[i, jm])
                avg = 0.5 * (d[ip, j] + d[im, j]) + 0.5 * (d[i, jp] + d[i, jm])
                candidate = 0.5 * (1.0 - np.sqrt(gx * gx + gy * gy) + avg)
                if candidate < 0.0:
                    candidate = 0.0
                if candidate < d[i, j]:
                    change = d[i, j] - candidate
                    if change > max_change:
                        max_change = change
                    d[i, j] = candidate
    return max_change


@njit(cache=True)
def _sweep_cycle_3d(d: np.ndarray, frozen: np.ndarray) -> float:
    nx, ny, nz = d.shape
    max_change = 0.0
    for order in range(8):
        flip_x = order & 1
        flip_y = (order >> 1) & 1
        flip_z = (order >> 2) & 1
        for ii in range(nx):
            i = nx - 1 - ii if flip_x else ii
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            for jj in range(ny):
                j = ny - 1 - jj if flip_y else jj
                jm = max(j - 1, 0)
                jp = min(j + 1, ny - 1)
                for kk in range(nz):
                    k = nz - 1 - kk if flip_z else kk
                    if frozen[i, j, k]:
                        continue
                    km = max(k - 1, 0)
                    kp = min(k + 1, nz - 1)
                    gx = 0.5 * (d[ip, j, k] - d[im, j, k])
                    gy = 0.5 * (d[i, jp, k] - d[i, jm, k])
                    gz = 0.5 * (d[i, j, kp] - d[i, j, km])
                    avg = 0.5 * (d[ip, j, k] + d[im, j, k] + d[i, jp, k]
                                 + d[i, jm, k] + d[i, j, kp] + d[i, j, km])
                    candidate = (1.0 - np.sqrt(gx * gx + gy * gy + gz * gz) + avg) / 3.0
                    if candidate < 0.0:
                        candidate = 0.0
                    if candidate < d[i, j, k]:
                        change = d[i, j, k] - candidate
                        if change > max_change:
                            max_change = change
                        d[i, j, k] = candidate
    return max_change


def sweep_cycle(d: np.ndarray, frozen: np.ndarray) -> float:
    """
    Run one Gauss-Seidel pass in every axis ordering, updating ``d`` in place.

    Args:
        d: Distance estimate (float64, modified in place)
        frozen: Boolean mask of source nodes that are never updated

    Returns:
        Largest nodewise decrease seen during the cycle
    """
    if d.dtype != np.float64 or not d.flags.c_contiguous:
        raise ValueError("sweep_cycle needs a C-contiguous float64 array")
    frozen = np.ascontiguousarray(frozen, dtype=np.bool_)
    if d.ndim == 2:
        return float(_sweep_cycle_2d(d, frozen))
    if d.ndim == 3:
        return float(_sweep_cycle_3d(d, frozen))
    raise ValueError(f"Distance fields must be 2D or 3D, got {d.ndim}D")


def rasterize_sources(cloud: PointCloud, grid: Grid) -> np.ndarray:
    """
    Seed field for the sweep: exact distances at the corners of every source cell.

    Nodes not touched by any point hold the grid diameter as a sentinel.
    """
    if len(cloud) == 0:
        raise ValueError("Cannot rasterize an empty point cloud")
    cloud.validate_for(grid)
    seed = np.full(grid.dims, grid.diameter, dtype=np.float64)
    pts = cloud.points
    upper = np.asarray(grid.dims) - 2
    base = np.clip(np.floor(pts).astype(np.int64), 0, upper)
    for offset in itertools.product((0, 1), repeat=grid.ndim):
        corner = base + np.asarray(offset)
        dist = np.sqrt(np.sum((corner - pts) ** 2, axis=1))
        np.minimum.at(seed, tuple(corner.T), dist)
    return seed


def fast_sweep(seed: np.ndarray, sentinel: Optional[float] = None,
               tol: float = SWEEP_TOLERANCE, max_cycles: int = MAX_SWEEP_CYCLES) -> np.ndarray:
    """
    Solve |grad d| = 1 from a rasterized seed with the Lax-Friedrichs update.

    Nodes below the sentinel are sources and stay fixed. Cycles repeat until
    the largest change drops below ``tol``.

    Args:
        seed: Field from rasterize_sources
        sentinel: Value marking unknown nodes (defaults to the grid diameter)
        tol: Stopping threshold on the per-cycle maximum change
        max_cycles: Cycle cap

    Returns:
        Distance field, a new array

    Raises:
        ValueError: If the seed holds no source node
        NumericalFailure: If the cap is reached before convergence
    """
    d = np.array(seed, dtype=np.float64, order="C", copy=True)
    if sentinel is None:
        sentinel = Grid.like(d).diameter
    frozen = d < sentinel
    if not np.any(frozen):
        raise ValueError("Seed field has no source node below the sentinel")

    change = np.inf
    for cycle in range(1, max_cycles + 1):
        change = sweep_cycle(d, frozen)
        logger.debug(f"Sweep cycle {cycle}: max change {change:.3e}")
        if change < tol:
            logger.info(f"Fast sweeping converged after {cycle} cycles on grid {d.shape}")
            return d
    raise NumericalFailure(
        f"Fast sweeping did not converge within {max_cycles} cycles (last change {change:.3e})",
        residual=float(change), iteration=max_cycles,
    )


def brute_force_distance(cloud: PointCloud, grid: Grid, chunk: int = 4096) -> np.ndarray:
    """Exact nodewise distance to the nearest cloud point."""
    nodes = grid.coordinates().reshape(grid.ndim, -1).T
    out = np.empty(nodes.shape[0], dtype=np.float64)
    for start in range(0, nodes.shape[0], chunk):
        block = cdist(nodes[start:start + chunk], cloud.points)
        out[start:start + chunk] = block.min(axis=1)
    return out.reshape(grid.dims)


@dataclass(frozen=True)
class DistanceField:
    """Distance field together with the cloud it was computed from."""

    d: np.ndarray
    sources: PointCloud
    grid: Grid


def distance_field(cloud: PointCloud, grid: Grid) -> DistanceField:
    """Rasterize the cloud and sweep; the field is computed once per run."""
    logger.info(f"Computing distance field for {len(cloud)} points on grid {grid.dims}")
    d = fast_sweep(rasterize_sources(cloud, grid), sentinel=grid.diameter)
    return DistanceField(d=d, sources=cloud, grid=grid)
