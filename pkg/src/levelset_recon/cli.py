"""Command-line interface: recon, distance, diagnose, generate and reproduce."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import __version__
from .config import get_settings
from .fileio import CLOUD_FORMATS, write_point_cloud
from .pipeline import build_config, compute_distance, config_from_file, load_cloud, run, run_diagnostics
from .recipes import RECIPES, run_recipe
from .synth import ShapeKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_CONVERGED = 2

SHAPE_KINDS = ShapeKind.__args__


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("input")
    group.add_argument("--input", type=Path, help="Point cloud file (xyz, csv or ply)")
    group.add_argument("--format", dest="input_format", choices=CLOUD_FORMATS, help="Input format override")
    group.add_argument("--shape", dest="shape_kind", choices=SHAPE_KINDS, help="Synthetic shape instead of a file")
    group.add_argument("--count", type=int, help="Number of synthetic points")
    group.add_argument("--seed", type=int, help="Synthetic sampling seed")
    group.add_argument("--grid", type=int, nargs="+", metavar="N", help="Grid dimensions (2 or 3 values)")
    group.add_argument("--noise", type=float, help="Gaussian noise sigma added to the cloud")
    group.add_argument("--noise-seed", type=int)
    group.add_argument("--output-dir", type=Path, help="Output directory (default RECON_OUTPUT_DIR)")
    group.add_argument("--no-outputs", dest="write_outputs", action="store_false", default=None,
                       help="Skip writing fields, meshes and reports")
    group.add_argument("--config", type=Path, help="Flat key = value file; its values override flags")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("solver")
    group.add_argument("--method", choices=("sim", "alm", "explicit"))
    group.add_argument("--init-center", type=float, nargs="+", metavar="X")
    group.add_argument("--init-radius", type=float)
    group.add_argument("--dt", type=float, help="Time step (sim, explicit)")
    group.add_argument("--beta", type=float, help="Implicit weight (sim)")
    group.add_argument("--eps", type=float, help="Smoothing width of the delta function")
    group.add_argument("--r", type=float, help="Penalty parameter (alm)")
    group.add_argument("--eta", type=float, help="Proximal weight (alm)")
    group.add_argument("--grad-floor", type=float)
    group.add_argument("--max-iters", type=int)
    group.add_argument("--k", type=int, help="Running-mean window of the stopping rule")
    group.add_argument("--tol", type=float, help="Relative change tolerance of the stopping rule")
    group.add_argument("--reinit-steps", type=int)
    group.add_argument("--snapshot-every", type=int, help="Write phi every N iterations (0 = never)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelset-recon",
        description="Reconstruct curves and surfaces from point clouds with level-set methods.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    recon = sub.add_parser("recon", help="Run one reconstruction")
    _add_input_flags(recon)
    _add_solver_flags(recon)

    distance = sub.add_parser("distance", help="Compute the distance field of a cloud")
    _add_input_flags(distance)
    distance.add_argument("--check", action="store_true", help="Compare against brute force")

    diagnose = sub.add_parser("diagnose", help="Export ALM diagnostic fields at chosen iterations")
    _add_input_flags(diagnose)
    _add_solver_flags(diagnose)
    diagnose.add_argument("--iterations", type=int, nargs="+", default=[],
                          help="Iterations to export (the final one is always exported)")

    generate = sub.add_parser("generate", help="Sample a synthetic point cloud")
    generate.add_argument("shape_kind", choices=SHAPE_KINDS)
    generate.add_argument("output", type=Path, help="Output cloud file")
    generate.add_argument("--format", dest="output_format", choices=CLOUD_FORMATS)
    generate.add_argument("--count", type=int)
    generate.add_argument("--seed", type=int)
    generate.add_argument("--grid", type=int, nargs="+", metavar="N")
    generate.add_argument("--noise", type=float)
    generate.add_argument("--noise-seed", type=int)

    reproduce = sub.add_parser("reproduce", help="Run a figure or table recipe")
    reproduce.add_argument("recipe", choices=tuple(RECIPES))
    reproduce.add_argument("--output-dir", type=Path)
    reproduce.add_argument("--no-outputs", dest="write_outputs", action="store_false", default=True)
    return parser


_NON_CONFIG = ("command", "config", "check", "iterations")


def collect_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Flag values (unset ones dropped) with the --config file merged over them."""
    values = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        values = config_from_file(config_path, base=values)
    return values


def _print(result: Dict[str, Any]) -> None:
    print(json.dumps(result, indent=2, default=str))


def _cmd_recon(args: argparse.Namespace) -> int:
    report = run(build_config(collect_values(args)))
    _print(report.summary())
    if not report.converged:
        logger.error(f"Reconstruction did not converge: {report.failure_reason}")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_distance(args: argparse.Namespace) -> int:
    _print(compute_distance(build_config(collect_values(args)), check=args.check))
    return EXIT_OK


def _cmd_diagnose(args: argparse.Namespace) -> int:
    values = collect_values(args)
    values["method"] = "alm"
    result = run_diagnostics(build_config(values), args.iterations)
    _print({k: v for k, v in result.items() if k != "active_fraction"})
    return EXIT_OK if result["report"]["converged"] else EXIT_NOT_CONVERGED


def _cmd_generate(args: argparse.Namespace) -> int:
    values = {k: v for k, v in vars(args).items()
              if k in ("shape_kind", "count", "seed", "grid", "noise", "noise_seed") and v is not None}
    cloud, grid = load_cloud(build_config(values))
    path = write_point_cloud(cloud, args.output, args.output_format)
    _print({'path': str(path), 'points': len(cloud), 'grid': list(grid.dims)})
    return EXIT_OK


def _cmd_reproduce(args: argparse.Namespace) -> int:
    result = run_recipe(args.recipe, output_dir=args.output_dir, write_outputs=args.write_outputs)
    _print({'recipe': result['recipe'], 'runs': len(result['rows']), 'summary_csv': result['summary_csv']})
    return EXIT_OK


_COMMANDS = {
    'recon': _cmd_recon,
    'distance': _cmd_distance,
    'diagnose': _cmd_diagnose,
    'generate': _cmd_generate,
    'reproduce': _cmd_reproduce,
}


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns 0 on success, 1 on failure, 2 on non-convergence."""
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    logging.basicConfig(level=getattr(logging, settings.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
