"""Tests for zero-set extraction and geometric metrics."""

import numpy as np
import pytest

from levelset_recon.cloud import PointCloud
from levelset_recon.errors import EmptyZeroSetError
from levelset_recon.grid import Grid
from levelset_recon.levelset import init_sphere
from levelset_recon.zeroset import (LineSet, TriangleMesh, extract_zero_set, hausdorff_between,
                                    hausdorff_to_cloud, interior_regions)


class TestExtractZeroSet:
    """Test extract_zero_set."""

    def test_circle_vertices(self):
        """Test that contour vertices lie within half a cell of the circle."""
        phi = init_sphere(Grid((64, 64)), (32.0, 32.0), 10.0)
        zero_set = extract_zero_set(phi)
        assert isinstance(zero_set, LineSet)
        radii = np.linalg.norm(zero_set.vertices - 32.0, axis=1)
        assert np.all(np.abs(radii - 10.0) <= 0.5)
        assert zero_set.components() == 1

    def test_closed_loop_segments(self):
        """Test that a closed contour has as many segments as vertices."""
        zero_set = extract_zero_set(init_sphere(Grid((40, 40)), None, 8.0))
        assert len(zero_set.segments) == len(zero_set.vertices)

    def test_all_positive(self):
        """Test that a field without a sign change gives an empty set."""
        assert extract_zero_set(np.ones((16, 16))).is_empty
        assert extract_zero_set(np.ones((8, 8, 8))).is_empty

    def test_two_components(self):
        """Test that two disjoint circles give two components."""
        grid = Grid((64, 32))
        phi = np.minimum(init_sphere(grid, (16.0, 16.0), 6.0), init_sphere(grid, (46.0, 16.0), 6.0))
        assert extract_zero_set(phi).components() == 2
        assert interior_regions(phi) == 2

    def test_sphere_is_watertight(self):
        """Test the closed-surface topology of a marching-cubes sphere."""
        mesh = extract_zero_set(init_sphere(Grid((32, 32, 32)), None, 9.0))
        assert isinstance(mesh, TriangleMesh)
        assert mesh.is_watertight()
        assert mesh.euler_characteristic() == 2
        assert mesh.components() == 1

    def test_rejects_1d(self):
        """Test the dimension check."""
        with pytest.raises(ValueError, match="2D or 3D"):
            extract_zero_set(np.array([-1.0, 1.0]))


class TestHausdorff:
    """Test the Hausdorff metrics."""

    def setup_method(self):
        """Set up test fixtures."""
        theta = np.linspace(0, 2 * np.pi, 200, endpoint=False)
        self.cloud = PointCloud(32.0 + 10.0 * np.column_stack([np.cos(theta), np.sin(theta)]))
        self.zero_set = extract_zero_set(init_sphere(Grid((64, 64)), (32.0, 32.0), 10.0))

    def test_matching_cloud(self):
        """Test that a cloud on the zero set is within the sampling gap."""
        assert hausdorff_to_cloud(self.zero_set, self.cloud) <= 0.6

    def test_translated_cloud(self):
        """Test the lower bound for a shifted contour."""
        shifted = self.cloud.translated((3.0, 0.0))
        assert hausdorff_to_cloud(self.zero_set, shifted) >= 2.5

    def test_empty(self):
        """Test that an empty zero set raises."""
        empty = extract_zero_set(np.ones((16, 16)))
        with pytest.raises(EmptyZeroSetError):
            hausdorff_to_cloud(empty, self.cloud)
        with pytest.raises(EmptyZeroSetError):
            hausdorff_between(empty, self.zero_set)

    def test_between_is_symmetric(self):
        """Test the symmetric distance between two contours."""
        other = extract_zero_set(init_sphere(Grid((64, 64)), (32.0, 32.0), 12.0))
        a = hausdorff_between(self.zero_set, other)
        assert a == pytest.approx(hausdorff_between(other, self.zero_set))
        assert a == pytest.approx(2.0, abs=0.5)
