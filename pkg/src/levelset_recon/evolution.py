"""Shared iteration loop, parameter base class and run report for the level-set solvers."""

import logging
import time
from typing import Any, Callable, Dict, List, Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import NumericalFailure
from .levelset import (DEFAULT_TOLERANCE, DEFAULT_WINDOW, REINIT_STEPS, EnergyHistory,
                       check_convergence, check_epsilon, energy, reinitialize)

logger = logging.getLogger(__name__)

State = TypeVar("State")
IterationCallback = Callable[[int, Any], None]


class EvolutionParams(BaseModel):
    """Settings common to every solver."""

    eps: float = 1.0
    max_iters: int = Field(default=2000, ge=1)
    k: int = Field(default=DEFAULT_WINDOW, ge=1)
    tol: float = Field(default=DEFAULT_TOLERANCE, gt=0)
    reinit_steps: int = Field(default=REINIT_STEPS, ge=0)

    @field_validator("eps")
    @classmethod
    def _check_eps(cls, v: float) -> float:
        return check_epsilon(v)


class RunReport(BaseModel):
    """Outcome of one solver run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: str
    converged: bool
    iterations: int
    wall_seconds: float
    energy_history: List[float]
    residual_history: List[float] = Field(default_factory=list)
    failure_reason: Optional[str] = None
    hausdorff_to_cloud: Optional[float] = None
    components: Optional[int] = None
    interior_regions: Optional[int] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    grid: List[int] = Field(default_factory=list)
    phi: Optional[np.ndarray] = Field(default=None, exclude=True, repr=False)

    @property
    def final_energy(self) -> Optional[float]:
        return self.energy_history[-1] if self.energy_history else None

    def summary(self) -> Dict[str, Any]:
        """Flat dict for logs, CSV rows and tool responses."""
        return {
            'method': self.method,
            'converged': self.converged,
            'iterations': self.iterations,
            'wall_seconds': round(self.wall_seconds, 4),
            'final_energy': self.final_energy,
            'hausdorff_to_cloud': self.hausdorff_to_cloud,
            'components': self.components,
            'interior_regions': self.interior_regions,
            'failure_reason': self.failure_reason,
        }


def evolve(method: str, state: State, *, d: np.ndarray, params: EvolutionParams, p: int,
           advance: Callable[[State, int], State],
           phi_of: Callable[[State], np.ndarray],
           with_phi: Callable[[State, np.ndarray], State],
           residual_of: Optional[Callable[[State], float]] = None,
           callback: Optional[IterationCallback] = None) -> RunReport:
    """
    Drive a solver until the running-mean energy settles.

    Each iteration advances the state, records E_p of the new phi, reinitializes
    phi, calls the hook and then tests convergence. Numerical failures end the
    run and are recorded in the report.

    Args:
        method: Name stored in the report
        state: Initial solver state
        d: Distance field
        params: Common solver settings
        p: Energy exponent recorded in the history
        advance: One solver step, given the state and the iteration index
        phi_of: Extract phi from a state
        with_phi: Replace phi in a state (used after reinitialization)
        residual_of: Optional per-iteration residual to record
        callback: Hook called as callback(iteration, state)

    Returns:
        RunReport with the final phi attached
    """
    history = EnergyHistory(k=params.k)
    residuals: List[float] = []
    converged = False
    failure: Optional[str] = None
    iteration = 0
    start = time.perf_counter()
    logger.info(f"Starting {method} on grid {tuple(d.shape)} (max {params.max_iters} iterations)")

    try:
        for iteration in range(1, params.max_iters + 1):
            state = advance(state, iteration)
            phi = phi_of(state)
            history.append(energy(phi, d, params.eps, p))
            if residual_of is not None:
                residuals.append(float(residual_of(state)))
            if params.reinit_steps:
                state = with_phi(state, reinitialize(phi, params.reinit_steps))
            if callback is not None:
                callback(iteration, state)
            change = history.relative_change()
            logger.debug(f"{method} iteration {iteration}: energy {history.values[-1]:.6e}, "
                         f"relative change {change}")
            if check_convergence(history, params.tol):
                converged = True
                break
    except NumericalFailure as e:
        failure = str(e)
        iteration = len(history)
        logger.error(f"{method} stopped at iteration {iteration + 1}: {failure}")

    if not converged and failure is None:
        failure = f"no convergence within {params.max_iters} iterations"

    wall = time.perf_counter() - start
    logger.info(f"{method} finished: converged={converged}, iterations={len(history)}, "
                f"wall time {wall:.2f}s")
    return RunReport(
        method=method,
        converged=converged,
        iterations=len(history),
        wall_seconds=wall,
        energy_history=list(history.values),
        residual_history=residuals,
        failure_reason=failure,
        params=params.model_dump(),
        grid=list(d.shape),
        phi=phi_of(state),
    )
