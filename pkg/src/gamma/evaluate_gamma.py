"""
Evaluate Gamma
==============
Closed-form values of the objective for step data on the m x n grid.

- lower_bracket / eval_lower:  L(g, b), the lower-bound constraint value
- eval_upper:                  U(g, a, b), the upper-bound constraint value
- gamma_exact:                 the objective itself, as four cell sums

All integrands are constant on grid cells, so every integral is a finite sum
with denominators dividing m*n. No quadrature.

The *_batch variants score numpy blocks of paths / pairs at once and are
what the search and certification loops call.
"""

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims, MonotonePath, PathPair, inverse_block, inverse_vector
from gamma.price_grid import PriceGrid
from utils.errors import InvalidPathError


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class GammaBreakdown:
    match_term: float    # (u, v) matched
    u_term: float        # E[t_u] when u goes elsewhere
    v_early_term: float  # E[t_v] when v is taken before u arrives
    v_late_term: float   # E[t_v] when v is left over by u

    @property
    def total(self) -> float:
        return self.match_term + self.u_term + self.v_early_term + self.v_late_term


def _check_dims(grid: PriceGrid, dims: GridDims):
    if grid.dims != dims:
        raise InvalidPathError(f"price grid is {grid.dims} but path is {dims}")


def _suffix_sums(grid: PriceGrid, jb) -> np.ndarray:
    """suffix[j] = sum_{k >= j} g(b^-_k, k), with suffix[n] = 0."""
    n = grid.dims.n
    cells = grid.g[np.asarray(jb, dtype=np.int64), np.arange(n)]
    suffix = np.zeros(n + 1)
    suffix[:n] = np.cumsum(cells[::-1])[::-1]
    return suffix


# =============================================================================
# LOWER BOUND
# =============================================================================

def lower_bracket(grid: PriceGrid, b: MonotonePath, i: int, j: int) -> float:
    """
    Value of stage i when u's fallback rank is j:
    j/n + (1 - j/n + b_i/n)(1 - g(i, j)) + (1/n) sum_{k=j}^{n-1} g(b^-_k, k).
    """
    _check_dims(grid, b.dims)
    m, n = b.dims.m, b.dims.n
    if not 0 <= i < m:
        raise InvalidPathError(f"stage {i} outside [0, {m})")
    if not b.b[i] <= j <= n:
        raise InvalidPathError(f"rank {j} outside [b_{i}={b.b[i]}, {n}]")
    jb = inverse_vector(b.b, n)
    tail = sum(grid.g[jb[k], k] for k in range(j, n))
    return j / n + (1 - j / n + b.b[i] / n) * (1 - grid.g[i, j]) + tail / n


def eval_lower(grid: PriceGrid, b: MonotonePath) -> float:
    """L(g, b): the objective minimized over a free fallback rank per stage."""
    _check_dims(grid, b.dims)
    m, n = b.dims.m, b.dims.n
    jb = inverse_vector(b.b, n)

    early = sum((1 - jb[j] / m) * grid.g[jb[j], j] for j in range(n)) / n
    offset = sum(b.b[:m]) / (m * n)

    suffix = _suffix_sums(grid, jb)
    best = 0.0
    for i in range(m):
        js = np.arange(b.b[i], n + 1)
        values = js / n + (1 - js / n + b.b[i] / n) * (1 - grid.g[i, js]) + suffix[js] / n
        best += values.min()
    return early - offset + best / m


def eval_lower_batch(grid: PriceGrid, block: np.ndarray) -> np.ndarray:
    """L(g, b) for every row of a (k, m+1) path block."""
    m, n = grid.dims.m, grid.dims.n
    block = np.asarray(block, dtype=np.int64)
    jb = inverse_block(block, n)                         # (k, n)
    ranks = np.arange(n)
    cells = grid.g[jb, ranks[None, :]]                   # g(b^-_j, j)

    early = ((1 - jb / m) * cells).sum(axis=1) / n
    offset = block[:, :m].sum(axis=1) / (m * n)

    suffix = np.zeros((block.shape[0], n + 1))
    suffix[:, :n] = np.cumsum(cells[:, ::-1], axis=1)[:, ::-1]

    js = np.arange(n + 1)[None, None, :]                 # (1, 1, n+1)
    bi = block[:, :m, None]                              # (k, m, 1)
    brackets = (js / n + (1 - js / n + bi / n) * (1 - grid.g[None, :m, :])
                + suffix[:, None, :] / n)
    brackets = np.where(js >= bi, brackets, np.inf)
    return early - offset + brackets.min(axis=2).sum(axis=1) / m


# =============================================================================
# UPPER BOUND
# =============================================================================

def eval_upper(grid: PriceGrid, pair: PathPair) -> float:
    """U(g, a, b): the objective with u's price read one stage later."""
    _check_dims(grid, pair.dims)
    m, n = pair.dims.m, pair.dims.n
    a, b = pair.a.b, pair.b.b
    jb = inverse_vector(b, n)

    match = sum(a[i] - b[i] for i in range(m)) / (m * n)
    u = sum((1 - a[i] / n + b[i] / n) * (1 - grid.g[i + 1, a[i]]) for i in range(m)) / m
    early = sum((1 - jb[j] / m) * grid.g[jb[j], j] for j in range(n)) / n
    late = sum(grid.g[jb[j], j] for i in range(m) for j in range(a[i], n)) / (m * n)
    return match + u + early + late


def eval_upper_batch(grid: PriceGrid, a_block: np.ndarray, b_block: np.ndarray) -> np.ndarray:
    """U(g, a, b) for matching rows of two (k, m+1) path blocks."""
    m, n = grid.dims.m, grid.dims.n
    a = np.asarray(a_block, dtype=np.int64)[:, :m]
    b = np.asarray(b_block, dtype=np.int64)
    jb = inverse_block(b, n)
    b = b[:, :m]
    ranks = np.arange(n)
    cells = grid.g[jb, ranks[None, :]]                   # g(b^-_j, j)

    match = (a - b).sum(axis=1) / (m * n)
    drop = grid.g[np.arange(1, m + 1)[None, :], a]       # g(i+1, a_i)
    u = ((1 - a / n + b / n) * (1 - drop)).sum(axis=1) / m
    early = ((1 - jb / m) * cells).sum(axis=1) / n
    count = (a[:, :, None] <= ranks[None, None, :]).sum(axis=1)  # #{i : a_i <= j}
    late = (count * cells).sum(axis=1) / (m * n)
    return match + u + early + late


# =============================================================================
# EXACT OBJECTIVE
# =============================================================================

def gamma_exact_vectors(grid: PriceGrid, a, b: MonotonePath) -> GammaBreakdown:
    """
    Objective for a monotone b and a per-stage a with b_i <= a_i <= n.

    a need not be monotone (vertex-weighted thresholds). It may be given with
    m or m+1 entries; a trailing entry is ignored.
    """
    _check_dims(grid, b.dims)
    m, n = b.dims.m, b.dims.n
    a = tuple(int(x) for x in a)[:m]
    if len(a) != m:
        raise InvalidPathError(f"alpha vector {a} needs {m} stage entries")
    for i in range(m):
        if not b.b[i] <= a[i] <= n:
            raise InvalidPathError(f"alpha_{i}={a[i]} outside [b_{i}={b.b[i]}, {n}]")
    jb = inverse_vector(b.b, n)

    match = sum(a[i] - b.b[i] for i in range(m)) / (m * n)
    u = sum((1 - a[i] / n + b.b[i] / n) * (1 - grid.g[i, a[i]]) for i in range(m)) / m
    early = sum((1 - jb[j] / m) * grid.g[jb[j], j] for j in range(n)) / n
    late = sum(grid.g[jb[j], j] for i in range(m) for j in range(a[i], n)) / (m * n)
    return GammaBreakdown(match, u, early, late)


def gamma_exact(grid: PriceGrid, pair: PathPair) -> GammaBreakdown:
    return gamma_exact_vectors(grid, pair.a.b, pair.b)


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    from gamma.price_grid import random_pair, random_price_grid

    rng = np.random.default_rng(0)
    dims = GridDims(3, 4)
    grid = random_price_grid(dims, rng)
    print(f"🚀 Sandwich on {dims} (L <= Gamma <= U)")
    print("=" * 50)
    for _ in range(5):
        pair = random_pair(dims, rng)
        low, exact, high = eval_lower(grid, pair.b), gamma_exact(grid, pair).total, eval_upper(grid, pair)
        print(f"   {str(pair):>20}: {low:.6f} <= {exact:.6f} <= {high:.6f}")
