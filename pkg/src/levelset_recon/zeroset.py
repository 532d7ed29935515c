"""Zero level-set extraction and geometric metrics."""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import directed_hausdorff
from skimage import measure

from .cloud import PointCloud
from .errors import EmptyZeroSetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineSet:
    """Polyline soup: ``vertices`` (n, 2) and ``segments`` (m, 2) vertex indices."""

    vertices: np.ndarray
    segments: np.ndarray

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def components(self) -> int:
        return _component_count(len(self.vertices), self.segments)


@dataclass(frozen=True)
class TriangleMesh:
    """Triangle mesh: ``vertices`` (n, 3) and ``faces`` (m, 3) vertex indices."""

    vertices: np.ndarray
    faces: np.ndarray

    @property
    def is_empty(self) -> bool:
        return len(self.faces) == 0

    def edges(self) -> np.ndarray:
        """Every face edge as a sorted index pair, duplicates kept."""
        e = np.vstack([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        return np.sort(e, axis=1)

    def is_watertight(self) -> bool:
        """Every edge is shared by exactly two faces."""
        if self.is_empty:
            return False
        _, counts = np.unique(self.edges(), axis=0, return_counts=True)
        return bool(np.all(counts == 2))

    def euler_characteristic(self) -> int:
        n_edges = len(np.unique(self.edges(), axis=0))
        return int(len(self.vertices) - n_edges + len(self.faces))

    def components(self) -> int:
        return _component_count(len(self.vertices), self.edges())


ZeroSet = Union[LineSet, TriangleMesh]


def _component_count(n_vertices: int, pairs: np.ndarray) -> int:
    if n_vertices == 0:
        return 0
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n_vertices, n_vertices))
    n, _ = connected_components(graph, directed=False)
    return int(n)


def extract_zero_set(phi: np.ndarray) -> ZeroSet:
    """
    Extract the zero level set by marching squares (2D) or marching cubes (3D).

    Vertices sit on grid edges where phi interpolates linearly to zero. A field
    without a sign change gives an empty result.
    """
    phi = np.asarray(phi, dtype=np.float64)
    has_crossing = phi.min() < 0.0 < phi.max()
    if phi.ndim == 2:
        if not has_crossing:
            return LineSet(np.zeros((0, 2)), np.zeros((0, 2), dtype=np.int64))
        vertices, segments, offset = [], [], 0
        for contour in measure.find_contours(phi, 0.0):
            closed = len(contour) > 2 and np.allclose(contour[0], contour[-1])
            pts = contour[:-1] if closed else contour
            n = len(pts)
            idx = np.arange(n) + offset
            if closed:
                segments.append(np.column_stack([idx, np.roll(idx, -1)]))
            else:
                segments.append(np.column_stack([idx[:-1], idx[1:]]))
            vertices.append(pts)
            offset += n
        return LineSet(np.vstack(vertices), np.vstack(segments).astype(np.int64))
    if phi.ndim == 3:
        if not has_crossing:
            return TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        verts, faces, _, _ = measure.marching_cubes(phi, level=0.0, allow_degenerate=False)
        return TriangleMesh(verts.astype(np.float64), faces.astype(np.int64))
    raise ValueError(f"Zero-set extraction needs a 2D or 3D field, got {phi.ndim}D")


def hausdorff_to_cloud(zero_set: ZeroSet, cloud: PointCloud) -> float:
    """
    Symmetric Hausdorff distance between zero-set vertices and the cloud, in cells.

    Raises:
        EmptyZeroSetError: If the zero set has no vertices
    """
    if len(zero_set.vertices) == 0:
        raise EmptyZeroSetError("Zero level set is empty; the reconstruction vanished")
    forward = directed_hausdorff(zero_set.vertices, cloud.points)[0]
    backward = directed_hausdorff(cloud.points, zero_set.vertices)[0]
    return float(max(forward, backward))


def hausdorff_between(a: ZeroSet, b: ZeroSet) -> float:
    """Symmetric Hausdorff distance between two extracted zero sets."""
    if len(a.vertices) == 0 or len(b.vertices) == 0:
        raise EmptyZeroSetError("Cannot compare an empty zero level set")
    return float(max(directed_hausdorff(a.vertices, b.vertices)[0],
                     directed_hausdorff(b.vertices, a.vertices)[0]))


def interior_regions(phi: np.ndarray) -> int:
    """Number of face-connected regions where phi < 0."""
    _, n = ndimage.label(np.asarray(phi) < 0)
    return int(n)
