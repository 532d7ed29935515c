"""Tests for the synthetic point-cloud generators."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import ndimage
from scipy.spatial import cKDTree

from levelset_recon.grid import Grid
from levelset_recon.synth import (JAR_HALF_HEIGHT, ShapeSpec, add_noise, bunny_face_cloud, default_spec,
                                  jar_profile, kfold_radius, sample_shape)


class TestShapeSpec:
    """Test ShapeSpec validation and defaults."""

    def test_defaults(self):
        """Test the recipe-sized defaults."""
        assert default_spec("triangle").count == 150
        assert default_spec("ellipse").count == 100
        assert default_spec("square_missing_corners").count == 80
        assert default_spec("kfold_circle").count == 200
        torus = default_spec("torus")
        assert torus.count == 2000
        assert torus.grid == (50, 50, 50)

    def test_overrides(self):
        """Test that overrides replace defaults."""
        spec = default_spec("kfold_circle", folds=3, seed=9)
        assert spec.folds == 3
        assert spec.seed == 9
        assert spec.resolved_amplitude == pytest.approx(6.0)

    def test_unknown_kind(self):
        """Test that unknown kinds are rejected."""
        with pytest.raises(ValueError, match="Unknown shape kind"):
            default_spec("dodecahedron")

    def test_grid_dimension(self):
        """Test that surfaces need 3D grids and curves 2D ones."""
        with pytest.raises(ValidationError, match="3D grid"):
            ShapeSpec(kind="sphere", grid=(100, 100))
        with pytest.raises(ValidationError, match="2D grid"):
            ShapeSpec(kind="circle", grid=(40, 40, 40))

    def test_torus_radii(self):
        """Test the torus radius ordering."""
        with pytest.raises(ValidationError, match="minor radius"):
            default_spec("torus", major_radius=5.0, minor_radius=6.0)


class TestSampleShape:
    """Test sample_shape for each kind."""

    def test_circle(self):
        """Test that circle points lie on the circle."""
        spec = default_spec("circle")
        cloud = sample_shape(spec)
        assert len(cloud) == 200
        radii = np.linalg.norm(cloud.points - np.array([49.5, 49.5]), axis=1)
        assert np.allclose(radii, 25.0)

    def test_deterministic(self):
        """Test that the seed fixes the cloud."""
        a = sample_shape(default_spec("ellipse", seed=3))
        b = sample_shape(default_spec("ellipse", seed=3))
        c = sample_shape(default_spec("ellipse", seed=4))
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)

    def test_ellipse_arc_length_spacing(self):
        """Test that ellipse samples are evenly spaced along the curve."""
        pts = sample_shape(default_spec("ellipse")).points
        gaps = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
        assert gaps.std() / gaps.mean() < 0.01

    def test_square_missing_corners(self):
        """Test that no point lies within the cut radius of a corner."""
        spec = default_spec("square_missing_corners")
        pts = sample_shape(spec).points
        c = np.array(spec.resolved_center)
        for sx, sy in [(-1, -1), (1, -1), (1, 1), (-1, 1)]:
            corner = c + 19.0 * np.array([sx, sy])
            assert np.min(np.linalg.norm(pts - corner, axis=1)) >= spec.corner_radius - 1e-9
        assert len(pts) == 80
        assert spec.corner_radius == 1.0

    def test_kfold_circle(self):
        """Test that points follow the k-fold radius."""
        spec = default_spec("kfold_circle")
        pts = sample_shape(spec).points - np.array(spec.resolved_center)
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        expected = kfold_radius(theta, 20.0, 6.0, 5)
        assert np.allclose(np.linalg.norm(pts, axis=1), expected, atol=1e-6)

    def test_triangle(self):
        """Test that triangle points stay inside the circumcircle."""
        spec = default_spec("triangle")
        pts = sample_shape(spec).points
        radii = np.linalg.norm(pts - np.array(spec.resolved_center), axis=1)
        assert radii.max() <= 27.0 + 1e-9
        assert radii.min() >= 27.0 / 2 - 1e-9

    def test_torus(self):
        """Test the implicit torus equation."""
        spec = default_spec("torus")
        pts = sample_shape(spec).points - np.array(spec.resolved_center)
        ring = np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2) - 12.0
        assert np.allclose(ring ** 2 + pts[:, 2] ** 2, 25.0)
        assert len(pts) == 2000

    def test_jar(self):
        """Test the jar sides, caps and point budget."""
        spec = default_spec("jar")
        pts = sample_shape(spec).points - np.array(spec.resolved_center)
        assert len(pts) == 2100
        assert np.all(np.abs(pts[:, 2]) <= JAR_HALF_HEIGHT + 1e-9)
        side = np.abs(np.abs(pts[:, 2]) - JAR_HALF_HEIGHT) > 1e-9
        rho = np.sqrt(pts[side, 0] ** 2 + pts[side, 1] ** 2)
        assert np.allclose(rho, jar_profile(pts[side, 2]))

    def test_sphere_on_grid(self):
        """Test the sphere sampler."""
        cloud = sample_shape(default_spec("sphere"))
        cloud.validate_for(Grid((50, 50, 50)))
        assert cloud.ndim == 3

    def test_shape_outside_grid(self):
        """Test that oversized shapes are rejected."""
        with pytest.raises(ValueError, match="outside grid"):
            sample_shape(default_spec("circle", radius=60.0))


class TestBunnyFace:
    """Test the bunny face generator."""

    def test_counts(self):
        """Test the point budget per density setting."""
        for n1, n2, n3 in ((20, 10, 20), (50, 10, 40)):
            assert len(bunny_face_cloud(n1, n2, n3)) == n1 + n2 + 2 * n3

    def test_via_shape_spec(self):
        """Test sampling through a ShapeSpec."""
        cloud = sample_shape(default_spec("bunny_face_density", n1=20, n2=10, n3=20))
        assert len(cloud) == 70
        cloud.validate_for(Grid((100, 100)))

    def test_single_closed_outline(self):
        """Test that a dense bunny separates the face from the domain corner."""
        cloud = bunny_face_cloud(300, 60, 200)
        grid = Grid((100, 100))
        cloud.validate_for(grid)
        nodes = np.stack(np.meshgrid(np.arange(100.0), np.arange(100.0), indexing="ij"), axis=-1)
        near, _ = cKDTree(cloud.points).query(nodes.reshape(-1, 2))
        labels, _ = ndimage.label((near > 1.5).reshape(100, 100))
        assert labels[49, 44] != 0
        assert labels[49, 44] != labels[0, 0]

    def test_seed_reproducible(self):
        """Test that the same seed gives the same cloud."""
        a = bunny_face_cloud(20, 10, 20, seed=3)
        np.testing.assert_array_equal(a.points, bunny_face_cloud(20, 10, 20, seed=3).points)


class TestAddNoise:
    """Test add_noise."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid((100, 100))
        self.cloud = sample_shape(default_spec("kfold_circle", folds=3))

    def test_invalid_sigma(self):
        """Test that negative sigma is rejected."""
        with pytest.raises(ValueError, match="sigma"):
            add_noise(self.cloud, -1.0, 1, self.grid)

    def test_zero_sigma(self):
        """Test that zero noise leaves the points unchanged."""
        assert np.array_equal(add_noise(self.cloud, 0.0, 1, self.grid).points, self.cloud.points)

    def test_noise_statistics(self):
        """Test the perturbation size and determinism."""
        a = add_noise(self.cloud, 1.0, 7, self.grid)
        b = add_noise(self.cloud, 1.0, 7, self.grid)
        assert np.array_equal(a.points, b.points)
        delta = a.points - self.cloud.points
        assert 0.8 < delta.std() < 1.2

    def test_clamped(self):
        """Test that noisy points stay inside the box."""
        noisy = add_noise(self.cloud, 50.0, 2, self.grid)
        noisy.validate_for(self.grid)
