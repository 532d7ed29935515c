"""Parametric test point clouds: planar curves, torus, sphere, jar and the bunny face."""

import logging
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .cloud import PointCloud
from .grid import Grid

logger = logging.getLogger(__name__)

ShapeKind = Literal["circle", "ellipse", "triangle", "square_missing_corners", "kfold_circle",
                    "torus", "sphere", "jar", "bunny_face_density"]

SHAPES_3D = ("torus", "sphere", "jar")
_CURVE_RESOLUTION = 20000

# Bunny face layout on the 100 x 100 domain. The outline is one closed curve:
# face arc, left ear loop, head arc between the ears, right ear loop.
FACE_CENTER = (49.5, 44.0)
FACE_RADIUS = 18.0
FACE_ARC = (-225.0, 45.0)
HEAD_CENTER = (49.5, 58.0)
HEAD_RADIUS = 7.8
HEAD_ARC = (23.0, 157.0)
EAR_CENTERS = ((35.6, 69.4), (63.4, 69.4))
EAR_AXES = (5.0, 12.0)
EAR_TILT = 25.0
# Ear loops leave this much of the ellipse open at the base, in degrees.
EAR_OPENING = 60.0


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; fixtures are reproducible from the seed alone."""
    return np.random.Generator(np.random.PCG64(seed))


class ShapeSpec(BaseModel):
    """A parametric point-cloud recipe."""

    kind: ShapeKind
    count: int = Field(default=200, ge=3)
    seed: int = 0
    grid: Tuple[int, ...] = (100, 100)
    center: Optional[Tuple[float, ...]] = None
    radius: float = Field(default=25.0, gt=0)
    radii: Tuple[float, float] = (27.0, 16.0)
    folds: int = Field(default=5, ge=1)
    amplitude: Optional[float] = None
    corner_radius: float = Field(default=1.0, ge=0)
    major_radius: float = Field(default=12.0, gt=0)
    minor_radius: float = Field(default=5.0, gt=0)
    n1: int = Field(default=50, ge=1)
    n2: int = Field(default=10, ge=1)
    n3: int = Field(default=40, ge=1)

    @model_validator(mode="after")
    def _check_geometry(self) -> "ShapeSpec":
        ndim = 3 if self.kind in SHAPES_3D else 2
        if len(self.grid) != ndim:
            raise ValueError(f"Shape '{self.kind}' needs a {ndim}D grid, got {self.grid}")
        Grid(self.grid)
        if self.center is not None and len(self.center) != ndim:
            raise ValueError(f"Center must have {ndim} coordinates, got {self.center}")
        if self.kind == "torus" and self.minor_radius >= self.major_radius:
            raise ValueError("Torus minor radius must be smaller than the major radius")
        return self

    @property
    def ndim(self) -> int:
        return len(self.grid)

    @property
    def resolved_center(self) -> np.ndarray:
        if self.center is not None:
            return np.asarray(self.center, dtype=np.float64)
        return np.asarray(Grid(self.grid).center, dtype=np.float64)

    @property
    def resolved_amplitude(self) -> float:
        return 0.3 * self.radius if self.amplitude is None else self.amplitude


def default_spec(kind: str, **overrides: Any) -> ShapeSpec:
    """Shape with the sizes used in the reproduction recipes."""
    defaults: Dict[str, Dict[str, Any]] = {
        "circle": {"radius": 25.0, "count": 200},
        "ellipse": {"radii": (27.0, 16.0), "count": 100},
        "triangle": {"radius": 27.0, "count": 150},
        "square_missing_corners": {"radius": 19.0, "corner_radius": 1.0, "count": 80},
        "kfold_circle": {"radius": 20.0, "folds": 5, "count": 200},
        "torus": {"major_radius": 12.0, "minor_radius": 5.0, "count": 2000, "grid": (50, 50, 50)},
        "sphere": {"radius": 15.0, "count": 2000, "grid": (50, 50, 50)},
        "jar": {"count": 2100, "grid": (50, 50, 50)},
        "bunny_face_density": {"n1": 50, "n2": 10, "n3": 40},
    }
    if kind not in defaults:
        raise ValueError(f"Unknown shape kind '{kind}'; choose from {', '.join(defaults)}")
    values = dict(defaults[kind])
    values.update(overrides)
    return ShapeSpec(kind=kind, **values)


def _arc_length_sample(curve: Callable[[np.ndarray], np.ndarray], t0: float, t1: float,
                       count: int, phase: float, closed: bool = True) -> np.ndarray:
    """Points equally spaced in arc length along curve(t), t in [t0, t1]."""
    t = np.linspace(t0, t1, _CURVE_RESOLUTION + 1)
    pts = curve(t)
    seg = np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))
    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    total = cumulative[-1]
    if closed:
        targets = (np.arange(count) + phase) / count * total
    else:
        targets = np.linspace(0.0, total, count)
    return curve(np.interp(targets, cumulative, t))


def _polyline_sample(vertices: np.ndarray, count: int, phase: float) -> np.ndarray:
    """Arc-length-uniform points along a closed polygon."""
    closed = np.vstack([vertices, vertices[:1]])
    seg = np.sqrt(np.sum(np.diff(closed, axis=0) ** 2, axis=1))
    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    targets = (np.arange(count) + phase) / count * cumulative[-1]
    idx = np.clip(np.searchsorted(cumulative, targets, side="right") - 1, 0, len(seg) - 1)
    frac = ((targets - cumulative[idx]) / seg[idx])[:, None]
    return closed[idx] + frac * (closed[idx + 1] - closed[idx])


def _segments_sample(segments: List[Tuple[np.ndarray, np.ndarray]], count: int, phase: float) -> np.ndarray:
    """Arc-length-uniform points over a set of disjoint segments."""
    starts = np.array([s for s, _ in segments])
    ends = np.array([e for _, e in segments])
    lengths = np.sqrt(np.sum((ends - starts) ** 2, axis=1))
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    targets = (np.arange(count) + phase) / count * cumulative[-1]
    idx = np.clip(np.searchsorted(cumulative, targets, side="right") - 1, 0, len(lengths) - 1)
    frac = ((targets - cumulative[idx]) / lengths[idx])[:, None]
    return starts[idx] + frac * (ends[idx] - starts[idx])


def _circle(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    c, r = spec.resolved_center, spec.radius
    theta = 2.0 * np.pi * (np.arange(spec.count) + rng.random()) / spec.count
    return c + r * np.column_stack([np.cos(theta), np.sin(theta)])


def _ellipse(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    c = spec.resolved_center
    a, b = spec.radii
    curve = lambda t: c + np.column_stack([a * np.cos(t), b * np.sin(t)])
    return _arc_length_sample(curve, 0.0, 2.0 * np.pi, spec.count, rng.random())


def _triangle(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    angles = np.deg2rad([90.0, 210.0, 330.0])
    vertices = spec.resolved_center + spec.radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return _polyline_sample(vertices, spec.count, rng.random())


def _square_missing_corners(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    c, h, cut = spec.resolved_center, spec.radius, spec.corner_radius
    if 2.0 * cut >= 2.0 * h:
        raise ValueError("Corner exclusion radius removes the whole square")
    corners = [c + np.array(v) * h for v in [(-1, -1), (1, -1), (1, 1), (-1, 1)]]
    segments = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        direction = (b - a) / np.linalg.norm(b - a)
        segments.append((a + cut * direction, b - cut * direction))
    return _segments_sample(segments, spec.count, rng.random())


def kfold_radius(theta: np.ndarray, radius: float, amplitude: float, folds: int) -> np.ndarray:
    return radius + amplitude * np.cos(folds * theta)


def _kfold_circle(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    c, amp = spec.resolved_center, spec.resolved_amplitude
    if amp >= spec.radius:
        raise ValueError("k-fold amplitude must be smaller than the base radius")

    def curve(t: np.ndarray) -> np.ndarray:
        rho = kfold_radius(t, spec.radius, amp, spec.folds)
        return c + np.column_stack([rho * np.cos(t), rho * np.sin(t)])

    return _arc_length_sample(curve, 0.0, 2.0 * np.pi, spec.count, rng.random())


def _sphere(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((spec.count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return spec.resolved_center + spec.radius * v


def _torus(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    big, small = spec.major_radius, spec.minor_radius
    out: List[np.ndarray] = []
    need = spec.count
    while need > 0:
        u = rng.random(2 * need) * 2.0 * np.pi
        v = rng.random(2 * need) * 2.0 * np.pi
        keep = rng.random(2 * need) < (big + small * np.cos(v)) / (big + small)
        u, v = u[keep][:need], v[keep][:need]
        ring = big + small * np.cos(v)
        out.append(np.column_stack([ring * np.cos(u), ring * np.sin(u), small * np.sin(v)]))
        need -= len(u)
    return spec.resolved_center + np.vstack(out)


def jar_profile(z: np.ndarray) -> np.ndarray:
    """Jar radius at height z in [-15, 15]: wide body, neck near z = 5, flared lip."""
    return 8.0 + 4.0 * np.cos(np.pi * (z + 15.0) / 20.0)


JAR_HALF_HEIGHT = 15.0


def _jar(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    h = JAR_HALF_HEIGHT
    z_fine = np.linspace(-h, h, 2001)
    rho = jar_profile(z_fine)
    slope = np.gradient(rho, z_fine)
    side_density = rho * np.sqrt(1.0 + slope ** 2)
    side_area = 2.0 * np.pi * np.trapezoid(side_density, z_fine)
    bottom_area = np.pi * jar_profile(np.array(-h))[()] ** 2
    top_area = np.pi * jar_profile(np.array(h))[()] ** 2
    total = side_area + bottom_area + top_area
    n_bottom = int(round(spec.count * bottom_area / total))
    n_top = int(round(spec.count * top_area / total))
    n_side = spec.count - n_bottom - n_top

    peak = side_density.max()
    sides: List[np.ndarray] = []
    need = n_side
    while need > 0:
        z = rng.uniform(-h, h, 2 * need)
        density = np.interp(z, z_fine, side_density)
        z = z[rng.random(2 * need) < density / peak][:need]
        theta = rng.random(len(z)) * 2.0 * np.pi
        r = jar_profile(z)
        sides.append(np.column_stack([r * np.cos(theta), r * np.sin(theta), z]))
        need -= len(z)

    def disk(n: int, z: float) -> np.ndarray:
        r = jar_profile(np.array(z))[()] * np.sqrt(rng.random(n))
        theta = rng.random(n) * 2.0 * np.pi
        return np.column_stack([r * np.cos(theta), r * np.sin(theta), np.full(n, z)])

    pts = np.vstack(sides + [disk(n_bottom, -h), disk(n_top, h)])
    return spec.resolved_center + pts


def _arc(center: Tuple[float, float], radius: float, start_deg: float, end_deg: float,
         count: int, rng: np.random.Generator) -> PointCloud:
    span = np.deg2rad(end_deg - start_deg)
    theta = np.deg2rad(start_deg) + span * (np.arange(count) + rng.random()) / count
    return PointCloud(radius * np.column_stack([np.cos(theta), np.sin(theta)])).translated(center)


def _ear(center: Tuple[float, float], tilt_deg: float, count: int, rng: np.random.Generator) -> PointCloud:
    """Tilted elliptical loop, open at the base where it joins the head."""
    a, b = EAR_AXES
    c, s = np.cos(np.deg2rad(tilt_deg)), np.sin(np.deg2rad(tilt_deg))

    def curve(t: np.ndarray) -> np.ndarray:
        x, y = a * np.cos(t), b * np.sin(t)
        return np.column_stack([c * x - s * y, s * x + c * y])

    gap = np.deg2rad(EAR_OPENING) / 2.0
    start = -0.5 * np.pi + gap
    local = _arc_length_sample(curve, start, start + 2.0 * np.pi - 2.0 * gap, count, rng.random())
    return PointCloud(local).translated(center)


def bunny_face_cloud(n1: int, n2: int, n3: int, seed: int = 0) -> PointCloud:
    """
    Bunny face with separate densities per region.

    The face arc runs from the base of the left ear round the chin to the base
    of the right ear; the head arc bridges the inner bases of the two ears.

    Args:
        n1: Points on the face arc
        n2: Points on the head arc
        n3: Points on each ear
        seed: RNG seed

    Returns:
        PointCloud of n1 + n2 + 2*n3 points on the 100 x 100 domain
    """
    rng = make_rng(seed)
    cloud = _arc(FACE_CENTER, FACE_RADIUS, *FACE_ARC, n1, rng)
    cloud = cloud.merged(_arc(HEAD_CENTER, HEAD_RADIUS, *HEAD_ARC, n2, rng))
    cloud = cloud.merged(_ear(EAR_CENTERS[0], EAR_TILT, n3, rng))
    return cloud.merged(_ear(EAR_CENTERS[1], -EAR_TILT, n3, rng))


_SAMPLERS: Dict[str, Callable[[ShapeSpec, np.random.Generator], np.ndarray]] = {
    "circle": _circle,
    "ellipse": _ellipse,
    "triangle": _triangle,
    "square_missing_corners": _square_missing_corners,
    "kfold_circle": _kfold_circle,
    "sphere": _sphere,
    "torus": _torus,
    "jar": _jar,
}


def sample_shape(spec: ShapeSpec) -> PointCloud:
    """
    Sample a point cloud from a shape recipe.

    Curves are sampled uniformly in arc length with a seeded phase, surfaces
    uniformly in area. The result is deterministic given the seed.

    Raises:
        ValueError: For an unknown kind or geometry that leaves the grid
    """
    if spec.kind == "bunny_face_density":
        cloud = bunny_face_cloud(spec.n1, spec.n2, spec.n3, seed=spec.seed)
    else:
        sampler = _SAMPLERS.get(spec.kind)
        if sampler is None:
            raise ValueError(f"Unknown shape kind '{spec.kind}'")
        cloud = PointCloud(sampler(spec, make_rng(spec.seed)))
    cloud.validate_for(Grid(spec.grid))
    logger.info(f"Sampled {len(cloud)} points for shape '{spec.kind}' (seed {spec.seed})")
    return cloud


def add_noise(cloud: PointCloud, sigma: float, seed: int, grid: Grid) -> PointCloud:
    """
    Perturb every coordinate with independent Gaussian noise.

    Points are clamped back into the grid box afterwards.

    Raises:
        ValueError: If sigma is negative
    """
    if sigma < 0:
        raise ValueError(f"Noise level sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return PointCloud(cloud.points)
    noisy = cloud.points + sigma * make_rng(seed).standard_normal(cloud.points.shape)
    upper = np.asarray(grid.dims, dtype=np.float64) - 1.0
    return PointCloud(np.clip(noisy, 0.0, upper))
