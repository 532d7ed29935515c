"""Augmented Lagrangian (ADMM) solver for the distance-weighted surface energy."""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from pydantic import Field

from .cloud import PointCloud
from .distance import distance_field
from .evolution import EvolutionParams, IterationCallback, RunReport, evolve
from .grid import Grid, divergence, gradient, vector_norm
from .spectral import HelmholtzProblem, solve_helmholtz

logger = logging.getLogger(__name__)

SHRINK_FLOOR = 1e-12


class AlmParams(EvolutionParams):
    """Penalty r, frozen coefficient eta and smoothing eps."""

    r: float = Field(default=1.5, gt=0)
    eta: float = Field(default=0.5, gt=0)


@dataclass(frozen=True)
class AlmState:
    """Iterate (phi, p, lambda); ``lam_prev`` is the multiplier one step back."""

    phi: np.ndarray
    p: np.ndarray
    lam: np.ndarray
    lam_prev: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, phi0: np.ndarray) -> "AlmState":
        """p = grad(phi0), lambda = 0."""
        phi0 = np.asarray(phi0, dtype=np.float64)
        zeros = np.zeros((phi0.ndim, *phi0.shape))
        return cls(phi=phi0.copy(), p=gradient(phi0), lam=zeros, lam_prev=zeros.copy())


def phi_subproblem(state: AlmState, d: np.ndarray, params: AlmParams) -> np.ndarray:
    """
    Frozen-coefficient update: solve eta*phi - r*lap(phi) = g.

    g = eta*phi_n + 2 d eps |p_n| phi_n / (pi (eps^2 + phi_n^2)^2) - div(r p_n + lambda_n)
    """
    phi, eps = state.phi, params.eps
    pull = 2.0 * d * eps * vector_norm(state.p) * phi / (np.pi * (eps * eps + phi * phi) ** 2)
    rhs = params.eta * phi + pull - divergence(params.r * state.p + state.lam)
    return solve_helmholtz(HelmholtzProblem(a=params.eta, b=params.r, rhs=rhs))


def shrinkage_weight(phi: np.ndarray, d: np.ndarray, eps: float) -> np.ndarray:
    """w = d * delta_eps(phi), the shrinkage threshold times r."""
    return d * eps / (np.pi * (eps * eps + phi * phi))


def p_subproblem(phi_next: np.ndarray, lambda_n: np.ndarray, d: np.ndarray, params: AlmParams) -> np.ndarray:
    """
    Closed-form minimizer of w|p| + (r/2)|p - q|^2 with q = grad(phi) - lambda/r.

    Nodes with r|q| <= w, or |q| below SHRINK_FLOOR, get p = 0.
    """
    q = gradient(phi_next) - lambda_n / params.r
    norm = vector_norm(q)
    w = shrinkage_weight(phi_next, d, params.eps)
    safe = np.where(norm < SHRINK_FLOOR, 1.0, norm)
    scale = np.where(norm < SHRINK_FLOOR, 0.0, np.maximum(0.0, 1.0 - w / (params.r * safe)))
    return scale * q


def multiplier_update(state: AlmState, phi_next: np.ndarray, p_next: np.ndarray, r: float) -> np.ndarray:
    """lambda + r (p - grad(phi))."""
    return state.lam + r * (p_next - gradient(phi_next))


def constraint_residual(phi: np.ndarray, p: np.ndarray) -> float:
    """Grid 2-norm of p - grad(phi)."""
    diff = p - gradient(phi)
    return float(np.sqrt(np.sum(diff * diff)))


def alm_step(state: AlmState, d: np.ndarray, params: AlmParams) -> AlmState:
    """phi sub-problem, p sub-problem, then multiplier ascent."""
    phi_next = phi_subproblem(state, d, params)
    p_next = p_subproblem(phi_next, state.lam, d, params)
    lam_next = multiplier_update(state, phi_next, p_next, params.r)
    return AlmState(phi=phi_next, p=p_next, lam=lam_next, lam_prev=state.lam,
                    iteration=state.iteration + 1)


def run_alm(cloud: PointCloud, grid: Grid, init: np.ndarray, params: Optional[AlmParams] = None,
            d: Optional[np.ndarray] = None, callback: Optional[IterationCallback] = None) -> RunReport:
    """
    Reconstruct with the augmented Lagrangian method.

    Energy E_1 is recorded before reinitialization; p and lambda are carried
    through reinitialization unchanged. The constraint residual |p - grad phi|
    is stored per iteration in ``residual_history``.

    Args:
        cloud: Input points
        grid: Computational grid
        init: Initial level set
        params: Solver parameters
        d: Precomputed distance field; computed from the cloud when omitted
        callback: Hook called as callback(iteration, AlmState)
    """
    params = params or AlmParams()
    phi0 = grid.check(init)
    if not np.all(np.isfinite(phi0)):
        raise ValueError("Initial level set contains non-finite values")
    if d is None:
        d = distance_field(cloud, grid).d
    return evolve(
        "alm", AlmState.initial(phi0), d=d, params=params, p=1,
        advance=lambda state, _: alm_step(state, d, params),
        phi_of=lambda state: state.phi,
        with_phi=lambda state, phi: replace(state, phi=phi),
        residual_of=lambda state: constraint_residual(state.phi, state.p),
        callback=callback,
    )
