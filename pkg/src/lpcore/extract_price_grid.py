"""
Extract Price Grid
==================
Read g out of an LP solution and repair solver noise.

Violations of [0, 1] or monotonicity up to 1e-6 are projected away
(isotonic regression along ranks, then stages, then boundaries re-set);
anything larger means the solution is not a price grid and is an error.
"""

import sys
from pathlib import Path

import numpy as np
from scipy.optimize import isotonic_regression

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.price_grid import PriceGrid, grid_violations, with_boundary
from gridpaths.grid_paths import GridDims
from lpcore.lp_model import LpSolution
from utils.config import REPAIR_TOLERANCE
from utils.errors import InfeasiblePriceGridError, SolverBackendError


def repair_grid(dims: GridDims, g: np.ndarray, tol: float = REPAIR_TOLERANCE) -> np.ndarray:
    """Project a nearly feasible (m+1, n+1) grid onto the feasible set."""
    m, n = dims.m, dims.n
    report = grid_violations(dims, g)
    worst = max(report.values())
    if worst > tol:
        details = ", ".join(f"{k}={v:.2e}" for k, v in report.items() if v > tol)
        raise InfeasiblePriceGridError(f"violation beyond repair tolerance {tol:.0e}: {details}")

    g = np.clip(g, 0.0, 1.0)
    g = with_boundary(dims, g[:m, :n])
    for i in range(m):
        g[i, :] = isotonic_regression(g[i, :], increasing=True).x
    for j in range(n):
        g[:, j] = isotonic_regression(g[:, j], increasing=False).x
    g = with_boundary(dims, g[:m, :n])

    # exact monotonicity after the float round-off of the projections
    g[:m, :] = np.maximum.accumulate(g[:m, :], axis=1)
    g = np.minimum.accumulate(g, axis=0)
    return with_boundary(dims, np.clip(g[:m, :n], 0.0, 1.0))


def extract_price_grid(sol: LpSolution, dims: GridDims) -> PriceGrid:
    if not sol.is_optimal:
        raise SolverBackendError(sol.backend, f"no price grid in a '{sol.status}' solution")
    m, n = dims.m, dims.n
    interior = np.asarray(sol.x[1:1 + m * n], dtype=float).reshape(m, n)
    return PriceGrid(dims, repair_grid(dims, with_boundary(dims, interior)))
