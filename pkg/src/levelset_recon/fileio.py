"""Readers and writers: point clouds, VTK fields, OBJ zero sets, energy CSV and JSON reports."""

import csv
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from plyfile import PlyData, PlyElement

from .cloud import PointCloud
from .errors import PointCloudFormatError
from .evolution import RunReport
from .zeroset import LineSet, TriangleMesh, ZeroSet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
CLOUD_FORMATS = ("xyz", "csv", "ply")
_AXES = ("x", "y", "z")


def infer_format(path: PathLike, fmt: Optional[str] = None) -> str:
    """Resolve a cloud format from an explicit name or the file suffix."""
    name = (fmt or Path(path).suffix.lstrip(".")).lower()
    if name in ("txt", "pts"):
        name = "xyz"
    if name == "ply_ascii":
        name = "ply"
    if name not in CLOUD_FORMATS:
        raise ValueError(f"Unsupported point cloud format '{name}' for {path}; "
                         f"use one of {', '.join(CLOUD_FORMATS)}")
    return name


def _parse_rows(path: PathLike, delimiter: Optional[str], allow_header: bool) -> np.ndarray:
    rows: List[List[float]] = []
    width: Optional[int] = None
    with open(path, "r") as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [s for s in (line.split(delimiter) if delimiter else line.split()) if s.strip()]
            try:
                values = [float(s) for s in fields]
            except ValueError:
                if allow_header and not rows and width is None:
                    allow_header = False
                    continue
                raise PointCloudFormatError(f"non-numeric record '{line}'", path=str(path), line=line_no)
            if width is None:
                if len(values) not in (2, 3):
                    raise PointCloudFormatError(f"expected 2 or 3 coordinates, got {len(values)}",
                                                path=str(path), line=line_no)
                width = len(values)
            elif len(values) != width:
                raise PointCloudFormatError(f"expected {width} coordinates, got {len(values)}",
                                            path=str(path), line=line_no)
            rows.append(values)
    if not rows:
        raise PointCloudFormatError("no points found", path=str(path))
    return np.asarray(rows, dtype=np.float64)


def _read_ply(path: PathLike) -> np.ndarray:
    try:
        data = PlyData.read(str(path))
        vertex = data["vertex"]
    except KeyError:
        raise PointCloudFormatError("PLY file has no vertex element", path=str(path))
    except Exception as e:
        raise PointCloudFormatError(f"unreadable PLY file: {e}", path=str(path))
    names = [p.name for p in vertex.properties]
    axes = [a for a in _AXES if a in names]
    if axes not in (["x", "y"], ["x", "y", "z"]):
        raise PointCloudFormatError(f"PLY vertex needs x, y[, z] properties, got {names}", path=str(path))
    return np.column_stack([np.asarray(vertex[a], dtype=np.float64) for a in axes])


def read_point_cloud(path: PathLike, fmt: Optional[str] = None) -> PointCloud:
    """
    Read a point cloud.

    Args:
        path: Input file
        fmt: One of xyz, csv, ply (inferred from the suffix when omitted)

    Returns:
        PointCloud with dimensionality taken from the column count

    Raises:
        PointCloudFormatError: On malformed records or inconsistent widths
    """
    name = infer_format(path, fmt)
    if name == "xyz":
        points = _parse_rows(path, None, allow_header=False)
    elif name == "csv":
        points = _parse_rows(path, ",", allow_header=True)
    else:
        points = _read_ply(path)
    logger.info(f"Read {len(points)} points from {path}")
    return PointCloud.from_points(points)


def write_point_cloud(cloud: PointCloud, path: PathLike, fmt: Optional[str] = None) -> Path:
    """Write a cloud as xyz text, csv with a header row, or ASCII PLY."""
    path = Path(path)
    name = infer_format(path, fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    axes = _AXES[:cloud.ndim]
    if name == "xyz":
        np.savetxt(path, cloud.points, fmt="%.17g")
    elif name == "csv":
        np.savetxt(path, cloud.points, fmt="%.17g", delimiter=",", header=",".join(axes), comments="")
    else:
        vertex = np.empty(len(cloud), dtype=[(a, "f8") for a in axes])
        for i, a in enumerate(axes):
            vertex[a] = cloud.points[:, i]
        PlyData([PlyElement.describe(vertex, "vertex")], text=True).write(str(path))
    logger.info(f"Wrote {len(cloud)} points to {path}")
    return path


def write_field(field: np.ndarray, path: PathLike, name: str = "phi") -> Path:
    """
    Write a scalar field as a legacy VTK STRUCTURED_POINTS ASCII file.

    Values are written x-fastest with shortest round-trip float formatting.
    """
    field = np.asarray(field, dtype=np.float64)
    if field.ndim not in (2, 3):
        raise ValueError(f"Only 2D or 3D fields can be written, got {field.ndim}D")
    dims = list(field.shape) + [1] * (3 - field.ndim)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write("# vtk DataFile Version 3.0\n")
            f.write(f"{name}\n")
            f.write("ASCII\n")
            f.write("DATASET STRUCTURED_POINTS\n")
            f.write(f"DIMENSIONS {dims[0]} {dims[1]} {dims[2]}\n")
            f.write("ORIGIN 0 0 0\n")
            f.write("SPACING 1 1 1\n")
            f.write(f"POINT_DATA {field.size}\n")
            f.write(f"SCALARS {name} double 1\n")
            f.write("LOOKUP_TABLE default\n")
            values = field.ravel(order="F")
            for start in range(0, values.size, dims[0]):
                f.write(" ".join(repr(float(v)) for v in values[start:start + dims[0]]))
                f.write("\n")
    except OSError as e:
        raise OSError(f"Failed to write field to {path}: {e}") from e
    return path


def read_field(path: PathLike) -> np.ndarray:
    """
    Read a field written by write_field.

    Returns:
        Array shaped by DIMENSIONS, with a trailing unit axis dropped for 2D data
    """
    with open(path, "r") as f:
        lines = f.read().split("\n")
    dims: Optional[List[int]] = None
    data_start: Optional[int] = None
    for i, line in enumerate(lines):
        parts = line.split()
        if parts and parts[0] == "DIMENSIONS":
            dims = [int(v) for v in parts[1:4]]
        elif parts and parts[0] == "LOOKUP_TABLE":
            data_start = i + 1
            break
    if dims is None or data_start is None:
        raise ValueError(f"{path}: not a structured-points VTK file")
    values = np.array(" ".join(lines[data_start:]).split(), dtype=np.float64)
    expected = int(np.prod(dims))
    if values.size != expected:
        raise ValueError(f"{path}: expected {expected} values, found {values.size}")
    shape = tuple(dims[:2]) if dims[2] == 1 else tuple(dims)
    return values.reshape(shape, order="F")


def write_obj(zero_set: ZeroSet, path: PathLike) -> Path:
    """Write a zero set as OBJ: ``v`` lines plus ``l`` segments (2D) or ``f`` faces (3D)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        if isinstance(zero_set, LineSet):
            for x, y in zero_set.vertices:
                f.write(f"v {float(x)!r} {float(y)!r} 0.0\n")
            for a, b in zero_set.segments:
                f.write(f"l {a + 1} {b + 1}\n")
        elif isinstance(zero_set, TriangleMesh):
            for x, y, z in zero_set.vertices:
                f.write(f"v {float(x)!r} {float(y)!r} {float(z)!r}\n")
            for a, b, c in zero_set.faces:
                f.write(f"f {a + 1} {b + 1} {c + 1}\n")
        else:
            raise TypeError(f"Cannot write {type(zero_set).__name__} as OBJ")
    return path


def write_energy_csv(report: RunReport, path: PathLike) -> Path:
    """One row per iteration: energy and, for ALM, the constraint residual."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        has_residual = bool(report.residual_history)
        writer.writerow(["iteration", "energy"] + (["residual"] if has_residual else []))
        for i, e in enumerate(report.energy_history):
            row = [i + 1, repr(e)]
            if has_residual:
                row.append(repr(report.residual_history[i]))
            writer.writerow(row)
    return path


def write_report_json(report: RunReport, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2))
    return path


def write_rows_csv(rows: List[dict], path: PathLike) -> Path:
    """Write summary rows (dicts sharing keys) as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys: List[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)
    return path
