"""Reconstruction pipeline: input, distance field, solver dispatch, metrics and outputs."""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .alm import AlmParams, AlmState, run_alm
from .cloud import PointCloud
from .config import get_settings, parse_config_file
from .diagnostics import DiagnosticBundle, diagnose
from .distance import brute_force_distance, distance_field
from .errors import EmptyZeroSetError
from .evolution import EvolutionParams, IterationCallback, RunReport
from .explicit import ExplicitParams, run_explicit
from .fileio import (read_point_cloud, write_energy_csv, write_field, write_obj,
                     write_point_cloud, write_report_json)
from .grid import Grid
from .levelset import init_sphere
from .sim import SimParams, run_sim
from .synth import ShapeSpec, add_noise, default_spec, sample_shape
from .zeroset import extract_zero_set, hausdorff_to_cloud, interior_regions

logger = logging.getLogger(__name__)

Method = Literal["sim", "alm", "explicit"]


class RunConfig(BaseModel):
    """Everything one reconstruction run needs."""

    input: Optional[Path] = None
    input_format: Optional[str] = None
    shape: Optional[ShapeSpec] = None
    method: Method = "sim"
    grid: Optional[Tuple[int, ...]] = None
    init_center: Optional[Tuple[float, ...]] = None
    init_radius: Optional[float] = Field(default=None, gt=0)
    noise: float = Field(default=0.0, ge=0)
    noise_seed: int = 1
    dt: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)
    eps: Optional[float] = Field(default=None, gt=0)
    r: Optional[float] = Field(default=None, gt=0)
    eta: Optional[float] = Field(default=None, gt=0)
    grad_floor: Optional[float] = Field(default=None, gt=0)
    max_iters: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    tol: Optional[float] = Field(default=None, gt=0)
    reinit_steps: int = Field(default=10, ge=0)
    snapshot_every: int = Field(default=0, ge=0)
    output_dir: Optional[Path] = None
    write_outputs: bool = True

    @model_validator(mode="after")
    def _check_input(self) -> "RunConfig":
        if (self.input is None) == (self.shape is None):
            raise ValueError("Exactly one of 'input' (a file) or 'shape' must be given")
        if self.method != "alm" and (self.r is not None or self.eta is not None):
            raise ValueError(f"r and eta only apply to method 'alm', not '{self.method}'")
        if self.method == "alm" and (self.dt is not None or self.beta is not None):
            raise ValueError("dt and beta do not apply to method 'alm'")
        if self.method == "explicit" and self.beta is not None:
            raise ValueError("beta does not apply to method 'explicit'")
        if self.grid is not None:
            Grid(self.grid)
        return self

    def solver_params(self, ndim: int) -> EvolutionParams:
        """Method parameters with unset values left at their defaults."""
        common = {'eps': self.eps, 'max_iters': self.max_iters, 'k': self.k, 'tol': self.tol,
                  'reinit_steps': self.reinit_steps}
        if self.method == "sim":
            return SimParams.for_dims(ndim, dt=self.dt, beta=self.beta, grad_floor=self.grad_floor, **common)
        values = {k: v for k, v in common.items() if v is not None}
        if self.method == "alm":
            values.update({k: v for k, v in {'r': self.r, 'eta': self.eta}.items() if v is not None})
            return AlmParams(**values)
        values.update({k: v for k, v in {'dt': self.dt, 'grad_floor': self.grad_floor}.items() if v is not None})
        return ExplicitParams(**values)


CONFIG_KEYS = tuple(RunConfig.model_fields) + ("shape_kind", "count", "seed")


def config_from_file(path: Path, base: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Merge a flat key-value config file over ``base``.

    ``shape_kind``/``count``/``seed`` build a default shape; ``grid`` and
    ``init_center`` take space- or comma-separated numbers.
    """
    merged = dict(base or {})
    for key, raw in parse_config_file(path, allowed=CONFIG_KEYS).items():
        if key in ("grid", "init_center"):
            merged[key] = [float(v) if key == "init_center" else int(v)
                           for v in raw.replace(",", " ").split()]
        elif key in ("shape_kind", "count", "seed"):
            merged[key] = raw
        elif key == "write_outputs":
            merged[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            merged[key] = raw
    return merged


def build_config(values: Dict[str, Any]) -> RunConfig:
    """
    Build a RunConfig from flat values (CLI flags merged with a config file).

    A ``shape_kind`` entry expands to the default ShapeSpec of that kind, with
    ``count``, ``seed`` and ``grid`` applied when present.

    Raises:
        ValueError: On invalid or conflicting values
    """
    values = {k: v for k, v in values.items() if v is not None}
    kind = values.pop("shape_kind", None)
    shape_overrides = {key: values.pop(key) for key in ("count", "seed") if key in values}
    if kind is not None:
        if "grid" in values:
            shape_overrides['grid'] = tuple(values["grid"])
        values["shape"] = default_spec(str(kind), **shape_overrides)
    elif shape_overrides:
        raise ValueError("count and seed need a shape kind")
    return RunConfig(**values)


def load_cloud(config: RunConfig) -> Tuple[PointCloud, Grid]:
    """Build the input cloud and the grid it lives on."""
    if config.shape is not None:
        grid = Grid(config.grid or config.shape.grid)
        spec = config.shape if tuple(config.shape.grid) == grid.dims else config.shape.model_copy(
            update={'grid': grid.dims})
        cloud = sample_shape(spec)
    else:
        cloud = read_point_cloud(config.input, config.input_format)
        if config.grid is not None:
            grid = Grid(config.grid)
        else:
            dims = tuple(max(4, int(np.ceil(v)) + 1) for v in cloud.points.max(axis=0))
            grid = Grid(dims)
            logger.info(f"No grid given; using {grid.dims} from the cloud extent")
    if config.noise > 0:
        cloud = add_noise(cloud, config.noise, config.noise_seed, grid)
    cloud.validate_for(grid)
    return cloud, grid


def initial_level_set(config: RunConfig, grid: Grid) -> np.ndarray:
    """Signed-distance circle; radius defaults to 0.3 of the smallest grid extent."""
    radius = config.init_radius or 0.3 * min(grid.dims)
    return init_sphere(grid, config.init_center, radius)


def _runner(method: str) -> Callable[..., RunReport]:
    return {'sim': run_sim, 'alm': run_alm, 'explicit': run_explicit}[method]


def run(config: RunConfig, callback: Optional[IterationCallback] = None) -> RunReport:
    """
    Run one reconstruction end to end.

    The distance field is computed once. Snapshots of phi are written every
    ``snapshot_every`` iterations; the final phi (VTK), zero set (OBJ), energy
    history (CSV) and report (JSON) go to the output directory.

    Args:
        config: Run configuration
        callback: Extra hook called as callback(iteration, state)

    Returns:
        RunReport with hausdorff_to_cloud, component and interior region counts filled in
    """
    cloud, grid = load_cloud(config)
    params = config.solver_params(grid.ndim)
    out_dir = Path(config.output_dir or get_settings().output_dir)
    d = distance_field(cloud, grid).d
    phi0 = initial_level_set(config, grid)

    def hook(iteration: int, state: Any) -> None:
        if config.write_outputs and config.snapshot_every and iteration % config.snapshot_every == 0:
            phi = state.phi if isinstance(state, AlmState) else state
            write_field(phi, out_dir / "snapshots" / f"phi_{iteration:05d}.vtk")
        if callback is not None:
            callback(iteration, state)

    logger.info(f"Running {config.method} on {len(cloud)} points, grid {grid.dims}")
    report = _runner(config.method)(cloud, grid, phi0, params, d=d, callback=hook)

    zero_set = extract_zero_set(report.phi)
    report.interior_regions = interior_regions(report.phi)
    try:
        report.hausdorff_to_cloud = hausdorff_to_cloud(zero_set, cloud)
        report.components = zero_set.components()
    except EmptyZeroSetError as e:
        logger.warning(str(e))
        report.components = 0
        if report.failure_reason is None:
            report.failure_reason = str(e)

    if config.write_outputs:
        write_field(report.phi, out_dir / "phi.vtk")
        write_obj(zero_set, out_dir / "zero_set.obj")
        write_energy_csv(report, out_dir / "energy.csv")
        write_report_json(report, out_dir / "report.json")
        logger.info(f"Outputs written to {out_dir}")
    return report


def compute_distance(config: RunConfig, check: bool = False) -> Dict[str, Any]:
    """
    Compute and write the distance field for a configured cloud.

    Args:
        config: Run configuration (only input, grid and noise are used)
        check: Also compare against the brute-force distance

    Returns:
        Summary with the output path and, when checked, the max deviation
    """
    cloud, grid = load_cloud(config)
    field = distance_field(cloud, grid)
    out_dir = Path(config.output_dir or get_settings().output_dir)
    result: Dict[str, Any] = {'grid': list(grid.dims), 'points': len(cloud),
                              'max_distance': float(field.d.max())}
    if config.write_outputs:
        result['path'] = str(write_field(field.d, out_dir / "distance.vtk", name="distance"))
        write_point_cloud(cloud, out_dir / "cloud.xyz")
    if check:
        exact = brute_force_distance(cloud, grid)
        result['max_error'] = float(np.max(np.abs(field.d - exact)))
    return result


def run_diagnostics(config: RunConfig, iterations: Sequence[int]) -> Dict[str, Any]:
    """
    Run ALM and export every diagnostic field at the requested iterations.

    The converged (final) iteration is always exported as well.
    """
    if config.method != "alm":
        config = config.model_copy(update={'method': 'alm', 'dt': None, 'beta': None})
    out_dir = Path(config.output_dir or get_settings().output_dir) / "diagnostics"
    wanted = set(int(i) for i in iterations)
    cloud, grid = load_cloud(config)
    params = config.solver_params(grid.ndim)
    d = distance_field(cloud, grid).d
    exported: List[int] = []
    active: Dict[int, float] = {}
    last: Dict[str, Any] = {}

    def hook(iteration: int, state: AlmState) -> None:
        last['state'] = state
        bundle = diagnose(state, d, params)
        active[iteration] = float(bundle.active_mask.mean())
        if config.write_outputs and iteration in wanted:
            _export_bundle(bundle, out_dir, iteration)
            exported.append(iteration)

    report = run_alm(cloud, grid, initial_level_set(config, grid), params, d=d, callback=hook)
    if config.write_outputs and report.iterations not in wanted and "state" in last:
        _export_bundle(diagnose(last['state'], d, params), out_dir, report.iterations)
        exported.append(report.iterations)
    return {'report': report.summary(), 'exported_iterations': exported,
            'active_fraction': active, 'output_dir': str(out_dir)}


def _export_bundle(bundle: DiagnosticBundle, out_dir: Path, iteration: int) -> None:
    for name, values in bundle.fields().items():
        write_field(values, out_dir / f"{name}_{iteration:05d}.vtk", name=name)
