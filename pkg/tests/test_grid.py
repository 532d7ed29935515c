"""Tests for the grid and finite-difference operators."""

import numpy as np
import pytest

from levelset_recon.cloud import PointCloud
from levelset_recon.grid import (Grid, backward_diff, divergence, forward_diff, gradient,
                                 gradient_magnitude, laplacian, vector_norm, wide_laplacian)


class TestGrid:
    """Test Grid construction and helpers."""

    def test_dims_validation(self):
        """Test that too few axes or too small axes are rejected."""
        with pytest.raises(ValueError, match="2 or 3 axes"):
            Grid((10,))
        with pytest.raises(ValueError, match=">= 4"):
            Grid((3, 10))

    def test_properties(self):
        """Test diameter, center and size."""
        grid = Grid((4, 4))
        assert grid.ndim == 2
        assert grid.size == 16
        assert grid.diameter == pytest.approx(np.sqrt(18.0))
        assert grid.center == (1.5, 1.5)

    def test_coordinates(self):
        """Test that coordinates are stacked with axis 0 as x."""
        grid = Grid((5, 6, 7))
        coords = grid.coordinates()
        assert coords.shape == (3, 5, 6, 7)
        assert coords[0, 4, 0, 0] == 4.0
        assert coords[2, 0, 0, 6] == 6.0

    def test_check_shape_mismatch(self):
        """Test that a field on another grid is rejected."""
        grid = Grid((8, 8))
        with pytest.raises(ValueError, match="does not match"):
            grid.check(np.zeros((8, 9)))
        assert grid.check(np.zeros((2, 8, 8)), vector=True).shape == (2, 8, 8)

    def test_contains(self):
        """Test the closed bounding box membership."""
        grid = Grid((10, 10))
        mask = grid.contains(np.array([[0.0, 0.0], [9.0, 9.0], [9.5, 1.0], [-0.1, 2.0]]))
        assert mask.tolist() == [True, True, False, False]


class TestDifferences:
    """Test periodic difference operators."""

    def setup_method(self):
        """Set up test fixtures."""
        rng = np.random.default_rng(7)
        self.u2 = rng.standard_normal((12, 10))
        self.u3 = rng.standard_normal((8, 6, 10))

    def test_one_sided_wraparound(self):
        """Test that one-sided differences wrap around the domain."""
        u = np.tile(np.arange(5.0)[:, None], (1, 4))
        assert backward_diff(u, 0)[0, 0] == -4.0
        assert forward_diff(u, 0)[4, 0] == -4.0
        assert forward_diff(u, 0)[1, 2] == 1.0

    def test_bad_axis(self):
        """Test that an out-of-range axis is rejected."""
        with pytest.raises(ValueError, match="out of range"):
            backward_diff(self.u2, 2)

    def test_gradient_of_linear_field(self):
        """Test that the centered gradient is exact away from the wrap."""
        u = Grid((10, 10)).coordinates()[0]
        g = gradient(u)
        assert np.allclose(g[0, 1:-1, :], 1.0)
        assert np.allclose(g[1], 0.0)

    def test_divergence_of_gradient_is_wide_laplacian(self):
        """Test the exact identity between composed operators and the spacing-2 stencil."""
        assert np.allclose(divergence(gradient(self.u2)), wide_laplacian(self.u2), atol=1e-12)
        assert np.allclose(divergence(gradient(self.u3)), wide_laplacian(self.u3), atol=1e-12)

    def test_laplacian_fourier_mode(self):
        """Test that a Fourier mode is an eigenvector of the 5-point Laplacian."""
        n = 16
        x = Grid((n, n)).coordinates()[0]
        u = np.cos(2 * np.pi * 3 * x / n)
        expected = (2 * np.cos(2 * np.pi * 3 / n) - 2) * u
        assert np.allclose(laplacian(u), expected, atol=1e-12)

    def test_laplacian_agrees_on_smooth_fields(self):
        """Test that both Laplacians agree for low frequencies."""
        n = 64
        x = Grid((n, n)).coordinates()[0]
        u = np.cos(2 * np.pi * x / n)
        assert np.allclose(wide_laplacian(u), laplacian(u), rtol=1e-2, atol=1e-6)

    def test_laplacian_of_constant(self):
        """Test that constants are in the kernel."""
        assert np.allclose(laplacian(np.full((6, 6, 6), 3.0)), 0.0)

    def test_divergence_component_check(self):
        """Test that a vector field with the wrong component count is rejected."""
        with pytest.raises(ValueError, match="components"):
            divergence(np.zeros((3, 8, 8)))

    def test_magnitudes(self):
        """Test gradient and vector norms."""
        u = 2.0 * Grid((8, 8)).coordinates()[1]
        assert np.allclose(gradient_magnitude(u)[:, 1:-1], 2.0)
        v = np.stack([np.full((4, 4), 3.0), np.full((4, 4), 4.0)])
        assert np.allclose(vector_norm(v), 5.0)


class TestPointCloud:
    """Test the PointCloud container."""

    def test_validation(self):
        """Test that empty, malformed and non-finite input is rejected."""
        with pytest.raises(ValueError, match="nonempty"):
            PointCloud(np.zeros((0, 2)))
        with pytest.raises(ValueError, match="2 or 3 coordinates"):
            PointCloud(np.zeros((3, 4)))
        with pytest.raises(ValueError, match="non-finite"):
            PointCloud(np.array([[1.0, np.nan]]))

    def test_read_only_copy(self):
        """Test that the cloud owns a read-only copy of its points."""
        raw = np.array([[1.0, 2.0], [3.0, 4.0]])
        cloud = PointCloud(raw)
        raw[0, 0] = 99.0
        assert cloud.points[0, 0] == 1.0
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 5.0

    def test_validate_for(self):
        """Test grid compatibility checks."""
        cloud = PointCloud.from_points([(1.0, 1.0), (20.0, 3.0)])
        with pytest.raises(ValueError, match="outside grid"):
            cloud.validate_for(Grid((10, 10)))
        with pytest.raises(ValueError, match="2D but grid is 3D"):
            cloud.validate_for(Grid((30, 30, 30)))
        cloud.validate_for(Grid((30, 30)))

    def test_merged_and_translated(self):
        """Test cloud composition helpers."""
        a = PointCloud.from_points([(1.0, 1.0)])
        b = a.translated((2.0, 3.0))
        assert b.points.tolist() == [[3.0, 4.0]]
        assert len(a.merged(b)) == 2
