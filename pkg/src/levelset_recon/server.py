"""Level-set reconstruction MCP server."""

import logging
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from mcp.server.fastmcp import FastMCP

from .config import LOG_LEVELS, get_settings, reset_settings
from .fileio import write_point_cloud
from .pipeline import build_config, compute_distance, load_cloud, run, run_diagnostics
from .recipes import run_recipe

# Load environment variables
load_dotenv()

_level = os.getenv("RECON_LOG_LEVEL", "INFO").strip().upper()
logging.basicConfig(level=_level if _level in LOG_LEVELS else "INFO")
logger = logging.getLogger(__name__)

# Create FastMCP server
mcp = FastMCP("levelset-recon")


def _numbers(text: str, cast=float) -> Optional[List[Any]]:
    """Parse '100 100' or '100,100' into a list; empty text means unset."""
    parts = text.replace(",", " ").split()
    return [cast(v) for v in parts] if parts else None


def _values(input_path: str = "", shape: str = "", count: int = 0, seed: int = -1, grid: str = "",
            noise: float = 0.0, output_dir: str = "", write_outputs: bool = True) -> Dict[str, Any]:
    """Map tool arguments (empty/zero meaning unset) onto build_config values."""
    return {
        'input': input_path or None,
        'shape_kind': shape or None,
        'count': count or None,
        'seed': seed if seed >= 0 else None,
        'grid': _numbers(grid, int),
        'noise': noise or None,
        'output_dir': output_dir or None,
        'write_outputs': write_outputs,
    }


@mcp.tool()
def recon_settings() -> str:
    """Show the active settings (threads, output directory, log level)"""
    try:
        reset_settings()
        settings = get_settings()
        result = {
            'success': True,
            'threads': settings.threads,
            'fft_workers': settings.fft_workers,
            'output_dir': str(settings.output_dir),
            'log_level': settings.log_level,
        }
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
def recon_generate_cloud(shape: str, output_path: str, count: int = 0, seed: int = -1, grid: str = "",
                         noise: float = 0.0) -> str:
    """Sample a synthetic point cloud (circle, ellipse, triangle, square_missing_corners, kfold_circle, torus, sphere, jar, bunny_face_density) and write it to a file"""
    try:
        config = build_config(_values(shape=shape, count=count, seed=seed, grid=grid, noise=noise))
        cloud, grid_obj = load_cloud(config)
        path = write_point_cloud(cloud, output_path)
        result = {'success': True, 'path': str(path), 'points': len(cloud), 'grid': list(grid_obj.dims)}
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
def recon_distance_field(input_path: str = "", shape: str = "", grid: str = "", output_dir: str = "",
                         check: bool = False) -> str:
    """Compute the unsigned distance field of a point cloud by fast sweeping and write it as VTK"""
    try:
        config = build_config(_values(input_path=input_path, shape=shape, grid=grid, output_dir=output_dir))
        result = {'success': True}
        result.update(compute_distance(config, check=check))
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
def recon_run(input_path: str = "", shape: str = "", method: str = "sim", grid: str = "",
              dt: float = 0.0, beta: float = 0.0, eps: float = 0.0, r: float = 0.0, eta: float = 0.0,
              max_iters: int = 0, noise: float = 0.0, output_dir: str = "", write_outputs: bool = True) -> str:
    """Reconstruct the zero level set of a point cloud with sim, alm or explicit; zero means default for numeric parameters"""
    try:
        values = _values(input_path=input_path, shape=shape, grid=grid, noise=noise,
                         output_dir=output_dir, write_outputs=write_outputs)
        values.update({'method': method, 'dt': dt or None, 'beta': beta or None, 'eps': eps or None,
                       'r': r or None, 'eta': eta or None, 'max_iters': max_iters or None})
        report = run(build_config(values))
        result = {'success': report.converged}
        result.update(report.summary())
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
def recon_diagnose(input_path: str = "", shape: str = "", iterations: str = "", grid: str = "",
                   eps: float = 0.0, r: float = 0.0, eta: float = 0.0, output_dir: str = "") -> str:
    """Run ALM and export the parameter-analysis fields (Q, discriminant, r bounds, alpha, masks) at the given iterations"""
    try:
        values = _values(input_path=input_path, shape=shape, grid=grid, output_dir=output_dir)
        values.update({'method': 'alm', 'eps': eps or None, 'r': r or None, 'eta': eta or None})
        outcome = run_diagnostics(build_config(values), _numbers(iterations, int) or [])
        result = {
            'success': True,
            'report': outcome['report'],
            'exported_iterations': outcome['exported_iterations'],
            'output_dir': outcome['output_dir'],
        }
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
def recon_reproduce(recipe: str, output_dir: str = "", write_outputs: bool = False) -> str:
    """Run a figure or table recipe (fig2-fig8, table1, table2) and write its summary CSV"""
    try:
        outcome = run_recipe(recipe, output_dir=output_dir or None, write_outputs=write_outputs)
        result = {'success': True, 'recipe': recipe, 'rows': outcome['rows'],
                  'summary_csv': outcome['summary_csv']}
        return str(result)
    except Exception as e:
        return f"Error: {str(e)}"


def main() -> None:
    """Run the MCP server over stdio."""
    logger.info("Starting levelset-recon MCP server")
    mcp.run()


# Export for mcp run
app = mcp
