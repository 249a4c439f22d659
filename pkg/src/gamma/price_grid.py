"""
Price Grid
==========
The discretized price function g(i, j), i = 0..m (stage), j = 0..n (rank).

f(x, y) = g(floor(m x), floor(n y)) splits a matched edge's weight into buyer
utility (1 - f) w and seller revenue f w.

Feasible grids are:
- non-decreasing in rank j
- non-increasing in stage i
- g(i, n) = 1 for every i, g(m, j) = 0 for j < n (g(m, n) = 1, never read)
"""

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims, MonotonePath, PathPair
from utils.config import GRID_CHECK_TOLERANCE
from utils.errors import InfeasiblePriceGridError


# =============================================================================
# TYPE
# =============================================================================

@dataclass(eq=False)
class PriceGrid:
    dims: GridDims
    g: np.ndarray  # shape (m+1, n+1)

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        check_price_grid(self.dims, self.g)

    @property
    def interior(self) -> np.ndarray:
        """The free entries g(i, j), i < m, j < n."""
        return self.g[: self.dims.m, : self.dims.n]

    def __getitem__(self, index):
        return self.g[index]

    def to_rows(self) -> list:
        """Row-major nested lists (JSON friendly)."""
        return self.g.tolist()

    @classmethod
    def from_rows(cls, dims: GridDims, rows) -> "PriceGrid":
        return cls(dims, np.array(rows, dtype=float))

    @classmethod
    def from_interior(cls, dims: GridDims, interior) -> "PriceGrid":
        """Fill the boundary around an (m, n) block of free values."""
        g = with_boundary(dims, np.asarray(interior, dtype=float))
        return cls(dims, g)

    def allclose(self, other: "PriceGrid", atol: float = 1e-9) -> bool:
        return self.dims == other.dims and np.allclose(self.g, other.g, atol=atol, rtol=0)


def with_boundary(dims: GridDims, interior: np.ndarray) -> np.ndarray:
    m, n = dims.m, dims.n
    if interior.shape != (m, n):
        raise InfeasiblePriceGridError(f"interior has shape {interior.shape}, expected ({m}, {n})")
    g = np.zeros((m + 1, n + 1))
    g[:m, :n] = interior
    g[:, n] = 1.0
    g[m, :n] = 0.0
    return g


def grid_violations(dims: GridDims, g: np.ndarray) -> dict:
    """Largest violation of each feasibility rule (0 when satisfied)."""
    m, n = dims.m, dims.n
    return {
        "range": float(max(0.0, -g.min(), g.max() - 1.0)),
        "rank_monotone": float(max(0.0, np.max(g[:, :-1] - g[:, 1:]))),
        "stage_monotone": float(max(0.0, np.max(g[1:, :] - g[:-1, :]))),
        "boundary": float(max(np.max(np.abs(g[:, n] - 1.0)), np.max(np.abs(g[m, :n])))),
    }


def check_price_grid(dims: GridDims, g: np.ndarray, tol: float = GRID_CHECK_TOLERANCE):
    m, n = dims.m, dims.n
    if g.shape != (m + 1, n + 1):
        raise InfeasiblePriceGridError(f"grid has shape {g.shape}, expected ({m + 1}, {n + 1})")
    if not np.all(np.isfinite(g)):
        raise InfeasiblePriceGridError("grid has non-finite entries")
    report = grid_violations(dims, g)
    bad = {k: v for k, v in report.items() if v > tol}
    if bad:
        details = ", ".join(f"{k}={v:.2e}" for k, v in bad.items())
        raise InfeasiblePriceGridError(f"infeasible price grid on {dims}: {details}")


# =============================================================================
# CONSTRUCTORS
# =============================================================================

def boundary_grid(dims: GridDims) -> PriceGrid:
    """All free entries 0: only the g(i, n) = 1 boundary is set."""
    return PriceGrid.from_interior(dims, np.zeros((dims.m, dims.n)))


def exponential_price_grid(dims: GridDims) -> PriceGrid:
    """g(i, j) = exp(j/n - 1), the price used by the adversarial-order analysis."""
    m, n = dims.m, dims.n
    row = np.exp(np.arange(n) / n - 1.0)
    return PriceGrid.from_interior(dims, np.tile(row, (m, 1)))


def random_price_grid(dims: GridDims, rng: np.random.Generator, strict: bool = True,
                      mix: float = 0.2) -> PriceGrid:
    """
    Random feasible grid.

    Rows are sorted uniforms, then a running minimum down the stages. With
    strict=True a small strictly monotone ramp is mixed in so that no two
    ranks (or stages) share a price.
    """
    m, n = dims.m, dims.n
    rows = np.sort(rng.uniform(0.0, 1.0, size=(m, n)), axis=1)
    rows = np.minimum.accumulate(rows, axis=0)
    if strict:
        ramp = ((np.arange(n) + 1) / (n + 1))[None, :] * ((m - np.arange(m)) / m)[:, None]
        rows = (1.0 - mix) * rows + mix * ramp
    return PriceGrid.from_interior(dims, rows)


def is_strictly_rank_monotone(grid: PriceGrid) -> bool:
    """g(i, j) < g(i, j+1) for every stage i < m and every j < n."""
    m = grid.dims.m
    return bool(np.all(np.diff(grid.g[:m, :], axis=1) > 0))


def random_path(dims: GridDims, rng: np.random.Generator) -> MonotonePath:
    head = np.sort(rng.integers(0, dims.n + 1, size=dims.m))
    return MonotonePath(dims, tuple(head.tolist()) + (dims.n,))


def random_pair(dims: GridDims, rng: np.random.Generator) -> PathPair:
    """Elementwise max / min of two random paths is a dominant pair."""
    x = random_path(dims, rng).b
    y = random_path(dims, rng).b
    a = tuple(max(p, q) for p, q in zip(x, y))
    b = tuple(min(p, q) for p, q in zip(x, y))
    return PathPair(MonotonePath(dims, a), MonotonePath(dims, b))


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    dims = GridDims(3, 4)
    print(f"🚀 Price grids on {dims}")
    print("=" * 50)
    print("\n📄 exponential:")
    print(np.round(exponential_price_grid(dims).g, 4))
    print("\n📄 random (strict, seed 0):")
    print(np.round(random_price_grid(dims, np.random.default_rng(0)).g, 4))
