"""Tests for the FFT Helmholtz solver."""

import numpy as np
import pytest

from levelset_recon.grid import Grid, divergence, gradient, laplacian
from levelset_recon.spectral import (HelmholtzProblem, divergence_gradient_symbol, laplacian_symbol,
                                     solve_helmholtz)


class TestSymbols:
    """Test operator eigenvalues."""

    def test_laplacian_symbol_range(self):
        """Test that eigenvalues lie in [-4 ndim, 0] with zero at the origin."""
        sigma = laplacian_symbol(Grid((16, 12)))
        assert sigma.shape == (16, 12)
        assert sigma[0, 0] == 0.0
        assert sigma.max() <= 1e-15
        assert sigma.min() >= -8.0 - 1e-12
        assert not sigma.flags.writeable

    def test_laplacian_symbol_uses_per_axis_extent(self):
        """Test that each axis uses its own length in the cosine."""
        sigma = laplacian_symbol(Grid((8, 16)))
        assert sigma[0, 1] == pytest.approx(2 * np.cos(2 * np.pi / 16) - 2)
        assert sigma[1, 0] == pytest.approx(2 * np.cos(2 * np.pi / 8) - 2)

    def test_divergence_gradient_symbol(self):
        """Test the composed operator symbol against a Fourier mode."""
        grid = Grid((16, 16))
        x = grid.coordinates()[0]
        u = np.cos(2 * np.pi * 3 * x / 16)
        sigma = divergence_gradient_symbol(grid)
        assert np.allclose(divergence(gradient(u)), sigma[3, 0] * u, atol=1e-12)


class TestSolveHelmholtz:
    """Test solve_helmholtz."""

    def setup_method(self):
        """Set up test fixtures."""
        self.rng = np.random.default_rng(3)

    def test_residual_2d(self):
        """Test that the solution satisfies the discrete system."""
        g = self.rng.standard_normal((32, 24))
        problem = HelmholtzProblem(a=1 / 500, b=0.1, rhs=g)
        phi = solve_helmholtz(problem, workers=1)
        assert phi.dtype == np.float64
        assert np.max(np.abs(problem.residual(phi))) < 1e-9

    def test_residual_3d(self):
        """Test the 3D solve."""
        g = self.rng.standard_normal((10, 12, 8))
        problem = HelmholtzProblem(a=0.5, b=0.01, rhs=g)
        phi = solve_helmholtz(problem, workers=1)
        assert np.allclose(0.5 * phi - 0.01 * laplacian(phi), g, atol=1e-10)

    def test_pure_mass(self):
        """Test that b = 0 reduces to division."""
        g = self.rng.standard_normal((8, 8))
        assert np.allclose(solve_helmholtz(HelmholtzProblem(2.0, 0.0, g)), g / 2.0)

    def test_constant_rhs(self):
        """Test that a constant right-hand side gives a constant solution."""
        phi = solve_helmholtz(HelmholtzProblem(0.25, 3.0, np.ones((8, 8))), workers=1)
        assert np.allclose(phi, 4.0)

    def test_invalid_coefficients(self):
        """Test coefficient validation."""
        with pytest.raises(ValueError, match="a must be > 0"):
            HelmholtzProblem(0.0, 1.0, np.zeros((4, 4)))
        with pytest.raises(ValueError, match="b must be >= 0"):
            HelmholtzProblem(1.0, -1.0, np.zeros((4, 4)))
