"""Level-set machinery: smoothed Heaviside/delta, initialization, reinitialization and energy."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .grid import Grid, gradient_magnitude

logger = logging.getLogger(__name__)

EPS_RANGE = (0.5, 2.0)
REINIT_STEPS = 10
REINIT_DT = 0.5
WENO_EPS = 1e-6
DEFAULT_WINDOW = 10
DEFAULT_TOLERANCE = 1e-4


def check_epsilon(eps: float) -> float:
    """
    Validate a smoothing width.

    Raises:
        ValueError: If eps is not strictly positive
    """
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"Smoothing parameter eps must be > 0, got {eps}")
    low, high = EPS_RANGE
    if not low <= eps <= high:
        logger.warning(f"eps={eps} is outside the usual operating range {low}-{high}")
    return eps


def smoothed_heaviside(phi: np.ndarray, eps: float) -> np.ndarray:
    return 0.5 + np.arctan(phi / eps) / np.pi


def smoothed_delta(phi: np.ndarray, eps: float) -> np.ndarray:
    """Derivative of the arctan Heaviside; peaks at 1/(pi*eps) on the zero set."""
    return eps / (np.pi * (eps * eps + phi * phi))


def init_sphere(grid: Grid, center: Optional[Sequence[float]], radius: float) -> np.ndarray:
    """
    Signed distance to a circle (sphere in 3D), negative inside.

    Args:
        grid: Target grid
        center: Center coordinates, None for the grid center
        radius: Circle radius in cells
    """
    if not radius > 0:
        raise ValueError(f"Initial radius must be > 0, got {radius}")
    c = np.asarray(grid.center if center is None else center, dtype=np.float64)
    if c.shape != (grid.ndim,):
        raise ValueError(f"Center must have {grid.ndim} coordinates, got {c.tolist()}")
    coords = grid.coordinates()
    offset = coords - c.reshape((grid.ndim,) + (1,) * grid.ndim)
    return np.sqrt(np.sum(offset * offset, axis=0)) - radius


def _weno5(v1: np.ndarray, v2: np.ndarray, v3: np.ndarray, v4: np.ndarray, v5: np.ndarray) -> np.ndarray:
    """Fifth-order WENO combination of five consecutive one-sided differences."""
    s1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    s2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    s3 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5) ** 2 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2
    a1 = 0.1 / (s1 + WENO_EPS) ** 2
    a2 = 0.6 / (s2 + WENO_EPS) ** 2
    a3 = 0.3 / (s3 + WENO_EPS) ** 2
    c1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0
    c2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0
    c3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0
    return (a1 * c1 + a2 * c2 + a3 * c3) / (a1 + a2 + a3)


def _one_sided(psi: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Backward and forward WENO5 derivatives along one axis; the box is extended linearly."""
    width = [(3, 3) if k == axis else (0, 0) for k in range(psi.ndim)]
    dq = np.diff(np.pad(psi, width, mode="reflect", reflect_type="odd"), axis=axis)
    n = psi.shape[axis]
    window = [slice(None)] * psi.ndim
    v: List[np.ndarray] = []
    for j in range(6):
        window[axis] = slice(j, j + n)
        v.append(dq[tuple(window)])
    return _weno5(v[0], v[1], v[2], v[3], v[4]), _weno5(v[5], v[4], v[3], v[2], v[1])


def upwind_gradient_norm(psi: np.ndarray, sign: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Godunov upwind |grad psi| built from WENO5 one-sided derivatives.

    Args:
        psi: Level-set function
        sign: Upwind orientation, the sign of psi when omitted

    Returns:
        Gradient magnitude taken from the side information flows in from
    """
    if sign is None:
        sign = np.sign(psi)
    total = np.zeros_like(psi)
    for axis in range(psi.ndim):
        back, fwd = _one_sided(psi, axis)
        outward = np.maximum(np.maximum(back, 0.0) ** 2, np.minimum(fwd, 0.0) ** 2)
        inward = np.maximum(np.minimum(back, 0.0) ** 2, np.maximum(fwd, 0.0) ** 2)
        total += np.where(sign > 0, outward, inward)
    return np.sqrt(total)


def _interface_mask(psi: np.ndarray) -> np.ndarray:
    """Nodes on the zero set or with an axis neighbor of opposite sign."""
    mask = psi == 0.0
    for axis in range(psi.ndim):
        lo = [slice(None)] * psi.ndim
        hi = [slice(None)] * psi.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        crossing = psi[tuple(lo)] * psi[tuple(hi)] < 0
        mask[tuple(lo)] |= crossing
        mask[tuple(hi)] |= crossing
    return mask


def _interface_distance(psi: np.ndarray) -> np.ndarray:
    """Distance estimate psi / |grad psi| with the largest of the central and one-sided slopes."""
    total = np.zeros_like(psi)
    for axis in range(psi.ndim):
        width = [(1, 1) if k == axis else (0, 0) for k in range(psi.ndim)]
        padded = np.pad(psi, width, mode="edge")
        n = psi.shape[axis]
        back = psi - np.take(padded, np.arange(0, n), axis=axis)
        fwd = np.take(padded, np.arange(2, n + 2), axis=axis) - psi
        slope = np.maximum(np.maximum(np.abs(back), np.abs(fwd)), 0.5 * np.abs(back + fwd))
        total += slope * slope
    return psi / np.maximum(np.sqrt(total), 1e-12)


def reinitialize(phi: np.ndarray, steps: int = REINIT_STEPS, dt: float = REINIT_DT) -> np.ndarray:
    """
    Pull phi back toward a signed distance function.

    Runs ``steps`` third-order TVD Runge-Kutta pseudo-time iterations of
    psi_t = -S(psi0) (|grad psi| - 1) with the smoothed sign
    S(x) = x / sqrt(x^2 + 1) and a Godunov Hamiltonian on WENO5 one-sided
    derivatives. Nodes next to a sign change are set once to psi0 / |grad psi0|
    and held there, so the zero set stays where psi0 put it. Outside the box
    the field is extended linearly.
    """
    if steps < 0:
        raise ValueError(f"Reinitialization steps must be >= 0, got {steps}")
    psi = np.array(phi, dtype=np.float64, copy=True)
    if steps == 0:
        return psi
    sign = psi / np.sqrt(psi * psi + 1.0)
    frozen = _interface_mask(psi)
    psi[frozen] = _interface_distance(psi)[frozen]

    def rate(values: np.ndarray) -> np.ndarray:
        out = -sign * (upwind_gradient_norm(values, sign) - 1.0)
        out[frozen] = 0.0
        return out

    for _ in range(steps):
        stage = psi + dt * rate(psi)
        stage = 0.75 * psi + 0.25 * (stage + dt * rate(stage))
        psi = psi / 3.0 + 2.0 / 3.0 * (stage + dt * rate(stage))
    return psi


def energy_integral(phi: np.ndarray, d: np.ndarray, eps: float, p: int) -> float:
    """Sum of d^p * delta_eps(phi) * |grad phi| with unit cell volume."""
    weight = d if p == 1 else d ** p
    return float(np.sum(weight * smoothed_delta(phi, eps) * gradient_magnitude(phi)))


def energy(phi: np.ndarray, d: np.ndarray, eps: float, p: int) -> float:
    """
    Distance-weighted surface energy of the zero level set.

    Args:
        phi: Level-set function
        d: Distance to the point cloud
        eps: Smoothing width
        p: Exponent, 1 or 2

    Returns:
        The p-th root of energy_integral
    """
    if p not in (1, 2):
        raise ValueError(f"Energy exponent p must be 1 or 2, got {p}")
    if phi.shape != d.shape:
        raise ValueError(f"phi {phi.shape} and d {d.shape} are on different grids")
    total = energy_integral(phi, d, eps, p)
    return total if p == 1 else float(np.sqrt(total))


@dataclass
class EnergyHistory:
    """Append-only energy log with a running-mean stopping test."""

    k: int = DEFAULT_WINDOW
    values: List[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"Window length k must be >= 1, got {self.k}")

    def append(self, value: float) -> None:
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"Energy must be finite and nonnegative, got {value}")
        self.values.append(value)

    def __len__(self) -> int:
        return len(self.values)

    def running_mean(self, n: int) -> float:
        """Mean of entries n-k .. n (k+1 values)."""
        if n < self.k or n >= len(self.values):
            raise IndexError(f"Running mean at {n} needs entries {n - self.k}..{n}")
        return float(np.mean(self.values[n - self.k:n + 1]))

    def relative_change(self) -> Optional[float]:
        """|mean(n-1) - mean(n)| / mean(n) at the newest entry, None while the window fills."""
        if len(self.values) < self.k + 2:
            return None
        n = len(self.values) - 1
        current = self.running_mean(n)
        previous = self.running_mean(n - 1)
        if current == 0.0:
            return 0.0
        return abs(previous - current) / current


def check_convergence(history: EnergyHistory, tol: float = DEFAULT_TOLERANCE) -> bool:
    """True once the running-mean energy changes by less than ``tol`` (relative)."""
    if not tol > 0:
        raise ValueError(f"Tolerance must be > 0, got {tol}")
    change = history.relative_change()
    return change is not None and change < tol


def enclosed_volume(phi: np.ndarray) -> float:
    """Node count with phi < 0: enclosed area in 2D, volume in 3D."""
    return float(np.count_nonzero(phi < 0))
