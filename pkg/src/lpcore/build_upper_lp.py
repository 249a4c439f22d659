"""
Build Upper LP
==============
The upper-bound LP: maximize gamma subject to gamma <= U(g, a, b) for every
pair in S (all dominant pairs when S is None), plus monotonicity of g.

Any LP(S) optimum is a valid upper bound; S = all pairs gives the full LP.
Rows are generated in numpy blocks, one row per pair:

    gamma + (1/m) sum_i w_i g(i+1, a_i)
          - sum_j [(1 - b^-_j/m)/n + c_j/(m n)] g(b^-_j, j)
      <= sum_i (a_i - b_i)/(m n) + (1/m) sum_i w_i

with w_i = 1 - a_i/n + b_i/n and c_j = #{i < m : a_i <= j}.
"""

import sys
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import (
    GridDims,
    MonotonePath,
    PathPair,
    all_path_array,
    count_pairs,
    count_paths,
    inverse_block,
)
from lpcore.lp_model import (
    GAMMA_COLUMN,
    ConstraintSet,
    LpModelBuilder,
    LpProblem,
    add_monotone_rows,
    add_price_grid,
    check_model_size,
    model_size_report,
    monotone_row_count,
    print_size_report,
)
from utils.config import CERTIFY_BLOCK_SIZE


# =============================================================================
# PAIR STREAMS
# =============================================================================

def dominant_pair_blocks(dims: GridDims, block_size: int = CERTIFY_BLOCK_SIZE):
    """Yield (a_block, b_block) int arrays covering every dominant pair, b-major."""
    paths = all_path_array(dims)
    per_chunk = max(1, block_size // len(paths))
    for start in range(0, len(paths), per_chunk):
        lows = paths[start:start + per_chunk]
        mask = np.all(paths[None, :, :] >= lows[:, None, :], axis=2)
        bi, ai = np.nonzero(mask)
        yield paths[ai], lows[bi]


# =============================================================================
# ROW GENERATION
# =============================================================================

def upper_row_block(dims: GridDims, a_block: np.ndarray, b_block: np.ndarray):
    """
    COO triplets of the gamma rows for k pairs.

    Returns (rows, cols, vals, rhs) with rows in 0..k-1 and boundary cells
    already folded into rhs.
    """
    m, n = dims.m, dims.n
    a = np.asarray(a_block, dtype=np.int64)
    b = np.asarray(b_block, dtype=np.int64)
    k = len(a)
    jb = inverse_block(b, n)
    a, b = a[:, :m], b[:, :m]
    ranks = np.arange(n)

    w = 1 - a / n + b / n
    count = (a[:, :, None] <= ranks[None, None, :]).sum(axis=1)

    cell_i = np.concatenate([np.broadcast_to(np.arange(1, m + 1), (k, m)), jb], axis=1)
    cell_j = np.concatenate([a, np.broadcast_to(ranks, (k, n))], axis=1)
    coef = np.concatenate([w / m, -((1 - jb / m) / n + count / (m * n))], axis=1)

    boundary = (cell_i == m) | (cell_j == n)
    folded = np.where(boundary, coef * np.where(cell_j == n, 1.0, 0.0), 0.0).sum(axis=1)
    rhs = (a - b).sum(axis=1) / (m * n) + w.sum(axis=1) / m - folded

    row_ids = np.broadcast_to(np.arange(k)[:, None], cell_i.shape)
    keep = ~boundary
    rows = np.concatenate([np.arange(k), row_ids[keep]])
    cols = np.concatenate([np.full(k, GAMMA_COLUMN), 1 + cell_i[keep] * n + cell_j[keep]])
    vals = np.concatenate([np.ones(k), coef[keep]])
    return rows, cols, vals, rhs


# =============================================================================
# SIZE
# =============================================================================

def project_upper_size(dims: GridDims, num_pairs: int = None) -> dict:
    """Exact variable/row counts and a nonzero bound, without building."""
    m, n = dims.m, dims.n
    pairs = count_pairs(dims) if num_pairs is None else num_pairs
    mono = monotone_row_count(dims)
    return model_size_report(1 + m * n, pairs + mono, pairs * (1 + m + n) + 2 * mono)


# =============================================================================
# BUILD
# =============================================================================

def build_upper_lp(dims: GridDims, S: ConstraintSet = None, force: bool = False,
                   verbose: bool = True) -> LpProblem:
    """LP(S); S = None instantiates every dominant pair."""
    if S is not None:
        if S.family != "upper":
            raise ValueError(f"upper LP needs an upper constraint set, got {S.family}")
        if S.dims != dims:
            raise ValueError(f"constraint set is on {S.dims}, model is on {dims}")
        if len(S) == 0:
            raise ValueError("upper LP needs a non-empty constraint set")

    report = project_upper_size(dims, None if S is None else len(S))
    check_model_size(report, force)

    builder = LpModelBuilder(dims, "upper")
    add_price_grid(builder)

    if S is None:
        blocks = list(dominant_pair_blocks(dims))
    else:
        keys = S.key_arrays()
        blocks = [(keys["a"], keys["b"])]

    for a_block, b_block in blocks:
        rows, cols, vals, rhs = upper_row_block(dims, a_block, b_block)
        start = builder.num_rows
        names = [f"gamma_{start + r}" for r in range(len(rhs))]
        builder.add_block(rows, cols, vals, ["L"] * len(rhs), rhs, names)

    add_monotone_rows(builder)
    keys = {
        "a": np.concatenate([blk[0] for blk in blocks], axis=0),
        "b": np.concatenate([blk[1] for blk in blocks], axis=0),
    }
    problem = builder.build(keys)
    if verbose:
        label = "upper LP (all pairs)" if S is None else f"upper LP(S), |S|={len(S):,}"
        print_size_report(f"{label} on {dims}", problem.size_report())
    return problem


def all_pairs_set(dims: GridDims) -> ConstraintSet:
    """Every dominant pair as a ConstraintSet, b-major order."""
    S = ConstraintSet("upper", dims)
    for a_block, b_block in dominant_pair_blocks(dims):
        for a, b in zip(a_block.tolist(), b_block.tolist()):
            S.add(PathPair(MonotonePath(dims, a), MonotonePath(dims, b)))
    return S


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    print("🚀 Upper LP sizes")
    print("=" * 50)
    for m in range(1, 8):
        d = GridDims(m, m)
        r = project_upper_size(d)
        print(f"   {str(d):>5}: {count_paths(d):>6,} paths, {r['constraints']:>12,} rows, "
              f"~{r['memory_gib']:.3f} GiB")
