"""Diagnostic fields describing where the distance function drives the ALM evolution."""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .alm import AlmParams, AlmState, shrinkage_weight
from .grid import GRADIENT_FLOOR, gradient, vector_norm

logger = logging.getLogger(__name__)


def _split_norm(grad_phi: np.ndarray, lambda_prev: np.ndarray, r: float) -> np.ndarray:
    return vector_norm(r * grad_phi - lambda_prev)


def q_field(phi: np.ndarray, grad_phi: np.ndarray, lambda_prev: np.ndarray, d: np.ndarray,
            eps: float, r: float) -> np.ndarray:
    """Q = phi pi m eps^2 - d eps + phi^3 pi m, with m = |r grad(phi) - lambda_prev|."""
    m = _split_norm(grad_phi, lambda_prev, r)
    return phi * np.pi * m * eps * eps - d * eps + phi ** 3 * np.pi * m


def discriminant_field(phi: np.ndarray, grad_phi: np.ndarray, lambda_prev: np.ndarray,
                       d: np.ndarray, r: float) -> np.ndarray:
    """Discriminant of Q as a quadratic in eps: d^2 - 4 phi^4 pi^2 m^2."""
    m = _split_norm(grad_phi, lambda_prev, r)
    return d * d - 4.0 * phi ** 4 * np.pi ** 2 * m * m


def shrinkage_margin(phi: np.ndarray, grad_phi: np.ndarray, lambda_prev: np.ndarray, d: np.ndarray,
                     eps: float, r: float) -> np.ndarray:
    """|r grad(phi) - lambda| - w; the shrinkage returns p = 0 exactly where this is <= 0."""
    return _split_norm(grad_phi, lambda_prev, r) - shrinkage_weight(phi, d, eps)


@dataclass(frozen=True)
class RBounds:
    """Penalty interval [r_lower, r_upper] with Disc >= 0 inside; zeros where ``valid`` is False."""

    r_lower: np.ndarray
    r_upper: np.ndarray
    alpha: np.ndarray
    valid: np.ndarray


def r_bounds(phi: np.ndarray, grad_phi: np.ndarray, lambda_prev: np.ndarray, d: np.ndarray,
             grad_floor: float = GRADIENT_FLOOR) -> RBounds:
    """
    Solve Disc >= 0 for r at every node.

    With g = grad(phi), c = (lambda . g)/|g| and alpha = |lambda|^2 - c^2, the
    bounds are (c -+ sqrt(T - alpha)) / |g| where T = d^2 / (4 phi^4 pi^2).
    Nodes with |g| <= grad_floor, phi = 0 or T < alpha are marked invalid.
    """
    g_norm = vector_norm(grad_phi)
    flat = g_norm <= grad_floor
    safe_norm = np.where(flat, 1.0, g_norm)
    proj = np.sum(lambda_prev * grad_phi, axis=0) / safe_norm
    alpha = np.sum(lambda_prev * lambda_prev, axis=0) - proj * proj
    alpha = np.where(flat, 0.0, alpha)

    phi4 = phi ** 4
    on_zero = phi4 == 0.0
    threshold = d * d / (4.0 * np.pi ** 2 * np.where(on_zero, 1.0, phi4))
    valid = ~flat & ~on_zero & (threshold >= alpha)
    root = np.sqrt(np.where(valid, threshold - alpha, 0.0))
    r_lower = np.where(valid, (proj - root) / safe_norm, 0.0)
    r_upper = np.where(valid, (proj + root) / safe_norm, 0.0)
    return RBounds(r_lower=r_lower, r_upper=r_upper, alpha=alpha, valid=valid)


def thin_band(phi: np.ndarray, eps: float) -> np.ndarray:
    """Nodes with |phi| < 2 eps / sqrt(3)."""
    bound = 2.0 * eps / np.sqrt(3.0)
    return (phi > -bound) & (phi < bound)


def influence_profile(x: np.ndarray, eps: float) -> np.ndarray:
    """h(x) = 2 eps x / (pi (eps^2 + x^2)^2), the phi-dependence of the ALM pull term."""
    return 2.0 * eps * x / (np.pi * (eps * eps + x * x) ** 2)


def influence_extrema(eps: float) -> Tuple[float, float]:
    """Arguments of the minimum and maximum of influence_profile."""
    x = eps / np.sqrt(3.0)
    return -x, x


def band_influence(d: np.ndarray, p: np.ndarray, eps: float, r: float) -> np.ndarray:
    """Peak pull magnitude inside the thin band: 9 d |p| / (8 sqrt(3) pi eps^2 r)."""
    _, peak = influence_extrema(eps)
    return d * vector_norm(p) * float(influence_profile(np.array(peak), eps)) / r


def active_region(state: AlmState, d: np.ndarray, params: AlmParams) -> np.ndarray:
    """Nodes where the shrinkage against lambda^{n-1} keeps p nonzero, plus the interior phi < 0."""
    margin = shrinkage_margin(state.phi, gradient(state.phi), state.lam_prev, d, params.eps, params.r)
    return (margin > 0) | (state.phi < 0)


@dataclass(frozen=True)
class DiagnosticBundle:
    """All diagnostic fields for one ALM snapshot."""

    q: np.ndarray
    disc: np.ndarray
    alpha: np.ndarray
    r_lower: np.ndarray
    r_upper: np.ndarray
    bounds_valid: np.ndarray
    margin: np.ndarray
    active_mask: np.ndarray
    band_mask: np.ndarray
    band_pull: np.ndarray

    def fields(self) -> Dict[str, np.ndarray]:
        """Name to float array, ready for the field writer."""
        return {name: np.asarray(getattr(self, name), dtype=np.float64)
                for name in ("q", "disc", "alpha", "r_lower", "r_upper", "bounds_valid",
                             "margin", "active_mask", "band_mask", "band_pull")}


def diagnose(state: AlmState, d: np.ndarray, params: AlmParams) -> DiagnosticBundle:
    """Evaluate every diagnostic field on an ALM snapshot (phi^n, lambda^{n-1})."""
    grad_phi = gradient(state.phi)
    bounds = r_bounds(state.phi, grad_phi, state.lam_prev, d)
    band = thin_band(state.phi, params.eps)
    bundle = DiagnosticBundle(
        q=q_field(state.phi, grad_phi, state.lam_prev, d, params.eps, params.r),
        disc=discriminant_field(state.phi, grad_phi, state.lam_prev, d, params.r),
        alpha=bounds.alpha,
        r_lower=bounds.r_lower,
        r_upper=bounds.r_upper,
        bounds_valid=bounds.valid,
        margin=shrinkage_margin(state.phi, grad_phi, state.lam_prev, d, params.eps, params.r),
        active_mask=active_region(state, d, params),
        band_mask=band,
        band_pull=np.where(band, band_influence(d, state.p, params.eps, params.r), 0.0),
    )
    logger.debug(f"Diagnostics at iteration {state.iteration}: "
                 f"{int(bundle.active_mask.sum())} active nodes, {int(bundle.band_mask.sum())} in band")
    return bundle
