"""FFT solver for the periodic problem a*phi - b*lap(phi) = g."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import scipy.fft

from .config import get_settings
from .grid import Grid, laplacian

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def _symbol(dims: Tuple[int, ...]) -> np.ndarray:
    sigma = np.zeros(dims, dtype=np.float64)
    for axis, n in enumerate(dims):
        shape = [1] * len(dims)
        shape[axis] = n
        k = np.arange(n, dtype=np.float64).reshape(shape)
        sigma = sigma + 2.0 * np.cos(2.0 * np.pi * k / n) - 2.0
    sigma.setflags(write=False)
    return sigma


def laplacian_symbol(grid: Grid) -> np.ndarray:
    """
    Eigenvalues of the periodic discrete Laplacian in DFT index order.

    Entry ``k`` equals the sum over axes of ``2cos(2 pi k_i / N_i) - 2``; all
    values lie in ``[-4 * ndim, 0]`` and the zero frequency maps to 0.
    """
    return _symbol(grid.dims)


def divergence_gradient_symbol(grid: Grid) -> np.ndarray:
    """Eigenvalues of divergence composed with the centered gradient."""
    sigma = np.zeros(grid.dims, dtype=np.float64)
    for axis, n in enumerate(grid.dims):
        shape = [1] * grid.ndim
        shape[axis] = n
        k = np.arange(n, dtype=np.float64).reshape(shape)
        sigma = sigma - np.sin(2.0 * np.pi * k / n) ** 2
    return sigma


@dataclass(frozen=True)
class HelmholtzProblem:
    """The linear system a*phi - b*lap(phi) = rhs on a periodic grid."""

    a: float
    b: float
    rhs: np.ndarray

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError(f"Mass coefficient a must be > 0, got {self.a}")
        if self.b < 0:
            raise ValueError(f"Diffusion coefficient b must be >= 0, got {self.b}")

    def residual(self, phi: np.ndarray) -> np.ndarray:
        """Pointwise a*phi - b*lap(phi) - rhs."""
        return self.a * phi - self.b * laplacian(phi) - self.rhs


def solve_helmholtz(problem: HelmholtzProblem, workers: Optional[int] = None) -> np.ndarray:
    """
    Solve a*phi - b*lap(phi) = g by diagonalizing the Laplacian.

    Args:
        problem: Coefficients and right-hand side
        workers: scipy.fft worker count (defaults to RECON_THREADS)

    Returns:
        Real-valued solution with the shape of the right-hand side
    """
    g = np.asarray(problem.rhs, dtype=np.float64)
    if workers is None:
        workers = get_settings().fft_workers
    if problem.b == 0:
        return g / problem.a

    sigma = _symbol(tuple(g.shape))
    g_hat = scipy.fft.fftn(g, workers=workers)
    phi_hat = g_hat / (problem.a - problem.b * sigma)
    phi = scipy.fft.ifftn(phi_hat, workers=workers)
    imag = float(np.max(np.abs(phi.imag))) if phi.size else 0.0
    if imag > 1e-8 * max(1.0, float(np.max(np.abs(phi.real)))):
        logger.warning(f"Helmholtz solve left an imaginary part of {imag:.3e}")
    return np.ascontiguousarray(phi.real)
