"""Tests for level-set operations and the energy history."""

import logging

import numpy as np
import pytest

from levelset_recon.distance import distance_field
from levelset_recon.grid import Grid
from levelset_recon.levelset import (EnergyHistory, check_convergence, check_epsilon, enclosed_volume, energy,
                                     energy_integral, init_sphere, reinitialize, smoothed_delta,
                                     smoothed_heaviside, upwind_gradient_norm)
from levelset_recon.synth import default_spec, sample_shape


class TestSmoothedFunctions:
    """Test the arctan Heaviside and its delta."""

    def test_values_at_zero(self):
        """Test the values on the zero set."""
        assert smoothed_heaviside(np.array(0.0), 1.0) == pytest.approx(0.5)
        assert smoothed_delta(np.array(0.0), 2.0) == pytest.approx(1 / (2 * np.pi))

    def test_delta_integrates_to_one(self):
        """Test unit mass of the smoothed delta."""
        x = np.linspace(-2000, 2000, 400001)
        assert np.trapezoid(smoothed_delta(x, 1.0), x) == pytest.approx(1.0, abs=1e-3)

    def test_delta_is_heaviside_derivative(self):
        """Test delta against a central difference of the Heaviside."""
        x = np.linspace(-10.0, 10.0, 2001)
        h = 1e-4
        for eps in (0.5, 1.0, 2.0):
            numeric = (smoothed_heaviside(x + h, eps) - smoothed_heaviside(x - h, eps)) / (2 * h)
            assert np.max(np.abs(numeric - smoothed_delta(x, eps))) <= 1e-6

    def test_heaviside_limits(self):
        """Test that the Heaviside tends to 0 and 1."""
        h = smoothed_heaviside(np.array([-1e6, 1e6]), 1.0)
        assert h[0] == pytest.approx(0.0, abs=1e-6)
        assert h[1] == pytest.approx(1.0, abs=1e-6)

    def test_check_epsilon(self, caplog):
        """Test epsilon validation and the operating-range warning."""
        with pytest.raises(ValueError, match="eps must be > 0"):
            check_epsilon(0.0)
        with caplog.at_level(logging.WARNING):
            assert check_epsilon(3.0) == 3.0
        assert "operating range" in caplog.text


class TestInitSphere:
    """Test init_sphere."""

    def test_signed_distance(self):
        """Test the sign convention and the zero set."""
        grid = Grid((32, 32))
        phi = init_sphere(grid, (16.0, 16.0), 5.0)
        assert phi[16, 16] == pytest.approx(-5.0)
        assert phi[21, 16] == pytest.approx(0.0)
        assert phi[31, 16] == pytest.approx(10.0)

    def test_default_center(self):
        """Test that None centers the sphere on the grid."""
        grid = Grid((11, 11, 11))
        phi = init_sphere(grid, None, 3.0)
        assert phi[5, 5, 5] == pytest.approx(-3.0)

    def test_invalid(self):
        """Test radius and center validation."""
        grid = Grid((16, 16))
        with pytest.raises(ValueError, match="radius"):
            init_sphere(grid, None, 0.0)
        with pytest.raises(ValueError, match="2 coordinates"):
            init_sphere(grid, (1.0, 2.0, 3.0), 4.0)

    def test_enclosed_volume(self):
        """Test the enclosed-area proxy against pi r^2."""
        phi = init_sphere(Grid((64, 64)), None, 10.0)
        assert enclosed_volume(phi) == pytest.approx(np.pi * 100, rel=0.08)


class TestReinitialize:
    """Test reinitialize."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid((48, 48))
        self.sdf = init_sphere(self.grid, None, 12.0)

    def test_zero_steps_copies(self):
        """Test that zero steps returns an unchanged copy."""
        out = reinitialize(self.sdf, steps=0)
        assert np.array_equal(out, self.sdf)
        assert out is not self.sdf

    def test_negative_steps(self):
        """Test that negative step counts are rejected."""
        with pytest.raises(ValueError, match="steps"):
            reinitialize(self.sdf, steps=-1)

    def test_preserves_signed_distance(self):
        """Test that an exact signed distance is nearly a fixed point."""
        out = reinitialize(self.sdf)
        radius = self.sdf + 12.0
        checked = radius >= 3.0
        assert np.max(np.abs(out - self.sdf)[checked]) <= 0.05

    def test_restores_unit_gradient(self):
        """Test that a steep field relaxes to |grad| = 1 within the pseudo-time reach."""
        steep = 3.0 * self.sdf
        out = reinitialize(steep)
        band = np.abs(out) < 5.0
        norm = upwind_gradient_norm(out)[band]
        assert np.median(upwind_gradient_norm(steep)[band]) == pytest.approx(3.0, rel=0.05)
        assert norm.min() >= 0.8
        assert norm.max() <= 1.2
        away = np.abs(self.sdf) > 1.0
        assert np.all(np.sign(out[away]) == np.sign(steep[away]))

    def test_zero_set_stays_put(self):
        """Test that nodes on both sides of the zero set keep their sign and distance."""
        out = reinitialize(3.0 * self.sdf)
        near = np.abs(self.sdf) < 1.0
        assert np.all(np.sign(out[near]) == np.sign(self.sdf[near]))
        assert np.max(np.abs(out - self.sdf)[near]) < 0.1

    def test_upwind_norm_of_linear_field(self):
        """Test the one-sided derivatives on a plane, including the box edges."""
        x = self.grid.coordinates()
        plane = 0.6 * x[0] - 0.8 * x[1] + 1.0
        assert np.allclose(upwind_gradient_norm(plane), 1.0, atol=1e-9)
        assert np.allclose(upwind_gradient_norm(2.0 * plane), 2.0, atol=1e-9)

    def test_three_dimensional(self):
        """Test the fixed-point property on a sphere."""
        grid = Grid((32, 32, 32))
        sdf = init_sphere(grid, None, 10.0)
        out = reinitialize(sdf)
        checked = sdf + 10.0 >= 3.0
        assert np.max(np.abs(out - sdf)[checked]) <= 0.05


class TestEnergy:
    """Test energy and energy_integral."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid((32, 32))
        self.phi = init_sphere(self.grid, None, 8.0)
        self.d = np.abs(self.phi) + 0.5

    def test_zero_distance(self):
        """Test that a zero distance field has zero energy."""
        assert energy(self.phi, np.zeros_like(self.phi), 1.0, 1) == 0.0

    def test_p2_is_root_of_squared_integral(self):
        """Test the p-th root relation."""
        assert energy(self.phi, self.d, 1.0, 2) == pytest.approx(
            np.sqrt(energy_integral(self.phi, self.d ** 2, 1.0, 1)))

    def test_energy_scales_with_distance(self):
        """Test linearity in d for p = 1."""
        assert energy(self.phi, 2 * self.d, 1.0, 1) == pytest.approx(2 * energy(self.phi, self.d, 1.0, 1))

    def test_sign_flip_invariance(self):
        """Test that inside and outside conventions give the same energy."""
        for p in (1, 2):
            assert energy(-self.phi, self.d, 1.0, p) == pytest.approx(energy(self.phi, self.d, 1.0, p), rel=1e-12)

    def test_grows_with_offset_from_cloud(self):
        """Test that circles farther from a sampled circle carry more energy."""
        spec = default_spec("circle")
        grid = Grid(spec.grid)
        d = distance_field(sample_shape(spec), grid).d
        for p in (1, 2):
            values = [energy(init_sphere(grid, None, 25.0 + offset), d, 1.0, p) for offset in (0.0, 2.0, 5.0)]
            assert values[0] < values[1] < values[2]

    def test_invalid_arguments(self):
        """Test exponent and shape validation."""
        with pytest.raises(ValueError, match="p must be 1 or 2"):
            energy(self.phi, self.d, 1.0, 3)
        with pytest.raises(ValueError, match="different grids"):
            energy(self.phi, self.d[:-1], 1.0, 1)


class TestEnergyHistory:
    """Test EnergyHistory and check_convergence."""

    def test_window_fill(self):
        """Test that the relative change is undefined until k + 2 entries."""
        history = EnergyHistory(k=3)
        for v in (5.0, 4.0, 3.0, 2.0):
            history.append(v)
        assert history.relative_change() is None
        history.append(1.0)
        assert history.relative_change() == pytest.approx(abs(3.5 - 2.5) / 2.5)

    def test_running_mean(self):
        """Test the k + 1 entry mean and its index checks."""
        history = EnergyHistory(k=2, values=[1.0, 2.0, 3.0, 4.0])
        assert history.running_mean(3) == pytest.approx(3.0)
        with pytest.raises(IndexError):
            history.running_mean(1)
        with pytest.raises(IndexError):
            history.running_mean(4)

    def test_constant_energy_converges(self):
        """Test that a flat history converges."""
        history = EnergyHistory(k=10)
        for _ in range(12):
            history.append(7.0)
        assert check_convergence(history, 1e-4)

    def test_decreasing_energy_not_converged(self):
        """Test that a steadily decreasing history keeps running."""
        history = EnergyHistory(k=10)
        for i in range(30):
            history.append(100.0 - 3.0 * i)
        assert not check_convergence(history, 1e-4)

    def test_geometric_decay_not_converged(self):
        """Test that a 10% per-step decay is still far from the tolerance."""
        history = EnergyHistory(k=10)
        for i in range(21):
            history.append(0.9 ** i)
        assert history.relative_change() == pytest.approx(1 / 0.9 - 1)
        assert not check_convergence(history, 1e-4)

    def test_zero_mean(self):
        """Test that an all-zero window reports no change."""
        history = EnergyHistory(k=1, values=[0.0, 0.0, 0.0])
        assert history.relative_change() == 0.0

    def test_invalid_values(self):
        """Test that invalid entries and settings are rejected."""
        history = EnergyHistory()
        with pytest.raises(ValueError, match="finite and nonnegative"):
            history.append(-1.0)
        with pytest.raises(ValueError, match="finite and nonnegative"):
            history.append(float("nan"))
        with pytest.raises(ValueError, match="k must be >= 1"):
            EnergyHistory(k=0)
        with pytest.raises(ValueError, match="Tolerance"):
            check_convergence(history, 0.0)
