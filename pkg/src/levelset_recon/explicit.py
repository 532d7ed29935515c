"""Forward-Euler gradient descent, the baseline the fast solvers are compared against."""

import logging
from typing import Optional

import numpy as np
from pydantic import Field

from .cloud import PointCloud
from .distance import distance_field
from .errors import InstabilityError
from .evolution import EvolutionParams, IterationCallback, RunReport, evolve
from .grid import GRADIENT_FLOOR, Grid, gradient_magnitude
from .sim import sim_forcing

logger = logging.getLogger(__name__)

MIN_SLOPE = 0.5


class ExplicitParams(EvolutionParams):
    dt: float = Field(default=20.0, gt=0)
    grad_floor: float = Field(default=GRADIENT_FLOOR, gt=0)
    max_iters: int = Field(default=20000, ge=1)
    max_displacement: float = Field(default=5.0, gt=0)


def zero_set_displacement(phi_n: np.ndarray, phi_next: np.ndarray) -> float:
    """Largest |phi_next - phi_n| / |grad phi_n| over nodes with |phi_n| <= 1, in cells.

    Slopes are floored at MIN_SLOPE so ridges of phi do not read as large jumps.
    """
    band = np.abs(phi_n) <= 1.0
    if not np.any(band):
        return 0.0
    speed = np.abs(phi_next - phi_n) / np.maximum(gradient_magnitude(phi_n), MIN_SLOPE)
    return float(np.max(speed[band]))


def explicit_step(phi_n: np.ndarray, d: np.ndarray, params: ExplicitParams,
                  iteration: Optional[int] = None) -> np.ndarray:
    """
    phi_n + dt * F(phi_n) with the same forcing as the semi-implicit step.

    Raises:
        InstabilityError: On non-finite values, runaway magnitude, or a zero-set
            jump larger than ``params.max_displacement`` cells
    """
    phi = phi_n + params.dt * sim_forcing(phi_n, d, params.eps, params.grad_floor)
    where = f" at iteration {iteration}" if iteration is not None else ""
    if not np.all(np.isfinite(phi)):
        raise InstabilityError(f"Explicit step produced non-finite values{where}", iteration=iteration)
    bound = 2.0 * np.sqrt(sum((n - 1) ** 2 for n in phi.shape))
    peak = float(np.max(np.abs(phi)))
    if peak > bound:
        raise InstabilityError(f"Explicit step blew up{where}: |phi| reached {peak:.3g}",
                               residual=peak, iteration=iteration)
    jump = zero_set_displacement(phi_n, phi)
    if jump > params.max_displacement:
        raise InstabilityError(
            f"Explicit step moved the zero level set {jump:.3g} cells{where} "
            f"(limit {params.max_displacement}); reduce dt",
            residual=jump, iteration=iteration,
        )
    return phi


def run_explicit(cloud: PointCloud, grid: Grid, init: np.ndarray, params: Optional[ExplicitParams] = None,
                 d: Optional[np.ndarray] = None, callback: Optional[IterationCallback] = None) -> RunReport:
    """Reconstruct with the explicit baseline; instability ends the run unconverged."""
    params = params or ExplicitParams()
    phi0 = grid.check(init)
    if not np.all(np.isfinite(phi0)):
        raise ValueError("Initial level set contains non-finite values")
    if d is None:
        d = distance_field(cloud, grid).d
    return evolve(
        "explicit", phi0.copy(), d=d, params=params, p=2,
        advance=lambda phi, it: explicit_step(phi, d, params, iteration=it),
        phi_of=lambda phi: phi,
        with_phi=lambda _, phi: phi,
        callback=callback,
    )
