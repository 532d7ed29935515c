"""Reproduction recipes: batches of runs behind each figure and table."""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .alm import AlmState
from .config import get_settings
from .errors import EmptyZeroSetError
from .fileio import write_rows_csv
from .levelset import enclosed_volume
from .pipeline import RunConfig, run, run_diagnostics
from .synth import default_spec
from .zeroset import extract_zero_set, hausdorff_between

logger = logging.getLogger(__name__)

PLANAR_SHAPES = ("triangle", "ellipse", "square_missing_corners", "kfold_circle")
SOLID_SHAPES = ("torus", "jar")
ALM_3D = {'r': 1.3, 'eps': 0.5, 'eta': 0.6}
BUNNY_DENSITIES = ((20, 10, 20), (50, 10, 20), (20, 10, 40), (50, 10, 40))
COLLAPSE_CHECK_ITERATION = 40
DIAGNOSTIC_ITERATIONS = (2, 3, 4, 7, 8, 10, 11, 13)

RecipeFn = Callable[[Path, bool], List[Dict[str, Any]]]


def _run(out_dir: Path, name: str, write: bool, **values: Any) -> Dict[str, Any]:
    config = RunConfig(output_dir=out_dir / name, write_outputs=write, **values)
    report = run(config)
    row = {'run': name}
    row.update(report.summary())
    return row


def fig2(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """ALM on the five-fold circle with r = eps = 1 and a sweep over eta."""
    rows = []
    for eta in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
        row = _run(out_dir, f"eta_{eta}", write, shape=default_spec("kfold_circle"),
                   method="alm", r=1.0, eps=1.0, eta=eta)
        rows.append({'eta': eta, **row})
    return rows


def fig3(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """The four planar shapes with SIM and with ALM at r = 1.5."""
    rows = []
    for kind in PLANAR_SHAPES:
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_sim", write, shape=default_spec(kind), method="sim")})
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_alm", write, shape=default_spec(kind),
                                           method="alm", r=1.5)})
    return rows


def table1(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Planar timing table: SIM, ALM for r in {0.5, 1, 1.5, 2} and the explicit method at dt = 20."""
    rows = []
    for kind in PLANAR_SHAPES:
        spec = default_spec(kind)
        rows.append({'shape': kind, 'r': None, **_run(out_dir, f"{kind}_sim", write, shape=spec, method="sim")})
        for r in (0.5, 1.0, 1.5, 2.0):
            rows.append({'shape': kind, 'r': r,
                         **_run(out_dir, f"{kind}_alm_r{r}", write, shape=spec, method="alm", r=r)})
        rows.append({'shape': kind, 'r': None,
                     **_run(out_dir, f"{kind}_explicit", write, shape=spec, method="explicit", dt=20.0)})
    return rows


def fig4(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Torus and jar surfaces with ALM (r 1.3, eps 0.5, eta 0.6) and SIM (beta 0.01)."""
    rows = []
    for kind in SOLID_SHAPES:
        spec = default_spec(kind)
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_alm", write, shape=spec, method="alm", **ALM_3D)})
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_sim", write, shape=spec, method="sim", beta=0.01)})
    return rows


def table2(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Surface timing table: SIM, ALM and the explicit method."""
    rows = []
    for kind in SOLID_SHAPES:
        spec = default_spec(kind)
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_sim", write, shape=spec, method="sim", beta=0.01)})
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_alm", write, shape=spec, method="alm", **ALM_3D)})
        rows.append({'shape': kind, **_run(out_dir, f"{kind}_explicit", write, shape=spec,
                                           method="explicit", dt=20.0)})
    return rows


def fig5(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Bunny face at four sampling densities; sparse faces collapse, the dense one converges."""
    rows = []
    for n1, n2, n3 in BUNNY_DENSITIES:
        areas: Dict[int, float] = {}

        def track(iteration: int, state: AlmState) -> None:
            if iteration in (1, COLLAPSE_CHECK_ITERATION):
                areas[iteration] = enclosed_volume(state.phi)

        spec = default_spec("bunny_face_density", n1=n1, n2=n2, n3=n3)
        config = RunConfig(shape=spec, method="alm", output_dir=out_dir / f"bunny_{n1}_{n2}_{n3}",
                           write_outputs=write)
        report = run(config, callback=track)
        rows.append({'n1': n1, 'n2': n2, 'n3': n3, 'area_start': areas.get(1),
                     f'area_iter_{COLLAPSE_CHECK_ITERATION}': areas.get(COLLAPSE_CHECK_ITERATION),
                     **report.summary()})
    return rows


def fig6(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Three-fold circle, clean versus Gaussian noise of sigma 1, for both solvers."""
    spec = default_spec("kfold_circle", folds=3)
    rows = []
    for method, extra in (("alm", {'r': 1.5}), ("sim", {})):
        clean = run(RunConfig(shape=spec, method=method, output_dir=out_dir / f"{method}_clean",
                              write_outputs=write, **extra))
        noisy = run(RunConfig(shape=spec, method=method, noise=1.0, output_dir=out_dir / f"{method}_noisy",
                              write_outputs=write, **extra))
        try:
            gap: Optional[float] = hausdorff_between(extract_zero_set(clean.phi), extract_zero_set(noisy.phi))
        except EmptyZeroSetError as e:
            logger.warning(f"{method}: {e}")
            gap = None
        rows.append({'method': method, 'clean_noisy_hausdorff': gap,
                     'clean_converged': clean.converged, 'noisy_converged': noisy.converged,
                     'clean_iterations': clean.iterations, 'noisy_iterations': noisy.iterations})
    return rows


def fig7(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """Diagnostic fields for ALM (r 2, eps 1) on the five-fold circle at selected iterations."""
    config = RunConfig(shape=default_spec("kfold_circle"), method="alm", r=2.0, eps=1.0,
                       output_dir=out_dir, write_outputs=write)
    result = run_diagnostics(config, DIAGNOSTIC_ITERATIONS)
    return [{'iteration': it, 'active_fraction': frac, 'exported': it in result['exported_iterations']}
            for it, frac in sorted(result['active_fraction'].items())]


def fig8(out_dir: Path, write: bool) -> List[Dict[str, Any]]:
    """ALM on the five-fold circle over r in {0.5, 0.8, 1, 2} and eps in {1, 1.5, 2}."""
    rows = []
    for eps in (1.0, 1.5, 2.0):
        for r in (0.5, 0.8, 1.0, 2.0):
            rows.append({'r': r, 'eps': eps, **_run(out_dir, f"r{r}_eps{eps}", write,
                                                    shape=default_spec("kfold_circle"), method="alm",
                                                    r=r, eps=eps)})
    return rows


RECIPES: Dict[str, RecipeFn] = {
    'fig2': fig2, 'fig3': fig3, 'fig4': fig4, 'fig5': fig5, 'fig6': fig6,
    'fig7': fig7, 'fig8': fig8, 'table1': table1, 'table2': table2,
}


def run_recipe(name: str, output_dir: Optional[Path] = None, write_outputs: bool = True) -> Dict[str, Any]:
    """
    Run a reproduction recipe and write its summary CSV.

    Args:
        name: Recipe name (see RECIPES)
        output_dir: Root directory (defaults to RECON_OUTPUT_DIR)
        write_outputs: Also write per-run fields, meshes and reports

    Returns:
        Dictionary with the summary rows and the CSV path
    """
    if name not in RECIPES:
        raise ValueError(f"Unknown recipe '{name}'; choose from {', '.join(RECIPES)}")
    out_dir = Path(output_dir or get_settings().output_dir) / name
    logger.info(f"Running recipe {name} into {out_dir}")
    rows = RECIPES[name](out_dir, write_outputs)
    summary = write_rows_csv(rows, out_dir / "summary.csv")
    return {'recipe': name, 'rows': rows, 'summary_csv': str(summary)}
