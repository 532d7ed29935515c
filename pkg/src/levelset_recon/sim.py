"""Semi-implicit gradient flow for the squared-distance weighted surface energy."""

import logging
from typing import Any, Optional

import numpy as np
from pydantic import Field

from .cloud import PointCloud
from .distance import distance_field
from .errors import NumericalFailure
from .evolution import EvolutionParams, IterationCallback, RunReport, evolve
from .grid import GRADIENT_FLOOR, Grid, divergence, gradient, laplacian
from .levelset import energy_integral, smoothed_delta
from .spectral import HelmholtzProblem, solve_helmholtz

logger = logging.getLogger(__name__)


class SimParams(EvolutionParams):
    """Time step, stabilizer and smoothing for the semi-implicit scheme."""

    dt: float = Field(default=500.0, gt=0)
    beta: float = Field(default=0.1, gt=0)
    grad_floor: float = Field(default=GRADIENT_FLOOR, gt=0)

    @classmethod
    def for_dims(cls, ndim: int, **overrides: Any) -> "SimParams":
        """Defaults for a 2D or 3D grid (beta 0.1 and 0.01 respectively)."""
        values = {'beta': 0.1 if ndim == 2 else 0.01}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def curvature_transport(d: np.ndarray, phi: np.ndarray, grad_floor: float) -> np.ndarray:
    """div(d^2 grad(phi) / |grad(phi)|) with the norm floored at grad_floor."""
    if d.shape != phi.shape:
        raise ValueError(f"d {d.shape} and phi {phi.shape} are on different grids")
    g = gradient(phi)
    norm = np.sqrt(np.sum(g * g, axis=0) + grad_floor * grad_floor)
    return divergence((d * d) * g / norm)


def f_coefficient(d: np.ndarray, phi: np.ndarray, eps: float) -> np.ndarray:
    """
    Pointwise factor 0.5 * delta_eps(phi) / sqrt(S), S the squared-distance energy integral.

    Raises:
        NumericalFailure: If S is zero (the energy has already vanished)
    """
    total = energy_integral(phi, d, eps, 2)
    if not total > 0:
        raise NumericalFailure("Energy integral vanished; nothing left to minimize", residual=total)
    return 0.5 * smoothed_delta(phi, eps) / np.sqrt(total)


def sim_forcing(phi: np.ndarray, d: np.ndarray, eps: float, grad_floor: float) -> np.ndarray:
    """Gradient-flow velocity f * curvature_transport, zero once the energy vanished."""
    try:
        f = f_coefficient(d, phi, eps)
    except NumericalFailure:
        logger.warning("Energy integral is zero; forcing set to zero")
        return np.zeros_like(phi)
    return f * curvature_transport(d, phi, grad_floor)


def sim_step(phi_n: np.ndarray, d: np.ndarray, params: SimParams) -> np.ndarray:
    """
    One stabilized semi-implicit step.

    Solves phi/dt - beta*lap(phi) = phi_n/dt - beta*lap(phi_n) + F(phi_n).
    """
    forcing = sim_forcing(phi_n, d, params.eps, params.grad_floor)
    if not np.any(forcing):
        return phi_n.copy()
    rhs = phi_n / params.dt - params.beta * laplacian(phi_n) + forcing
    phi = solve_helmholtz(HelmholtzProblem(a=1.0 / params.dt, b=params.beta, rhs=rhs))
    if not np.all(np.isfinite(phi)):
        raise NumericalFailure("Semi-implicit step produced non-finite values")
    return phi


def run_sim(cloud: PointCloud, grid: Grid, init: np.ndarray, params: Optional[SimParams] = None,
            d: Optional[np.ndarray] = None, callback: Optional[IterationCallback] = None) -> RunReport:
    """
    Reconstruct with the semi-implicit scheme.

    Args:
        cloud: Input points
        grid: Computational grid
        init: Initial level set
        params: Solver parameters (dimension defaults when omitted)
        d: Precomputed distance field; computed from the cloud when omitted
        callback: Hook called as callback(iteration, phi)

    Returns:
        RunReport for the run
    """
    params = params or SimParams.for_dims(grid.ndim)
    phi0 = grid.check(init)
    if not np.all(np.isfinite(phi0)):
        raise ValueError("Initial level set contains non-finite values")
    if d is None:
        d = distance_field(cloud, grid).d
    return evolve(
        "sim", phi0.copy(), d=d, params=params, p=2,
        advance=lambda phi, _: sim_step(phi, d, params),
        phi_of=lambda phi: phi,
        with_phi=lambda _, phi: phi,
        callback=callback,
    )
