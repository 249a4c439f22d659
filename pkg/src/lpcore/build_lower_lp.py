"""
Build Lower LP
==============
The lower-bound LP. Its optimum is a certified lower bound on the
competitive ratio; a restricted version over a path subset only gives an
upper estimate of that optimum (used by the heuristic search).

Variables: gamma, g(i, j) for i < m, j < n, and h(i, b) per stage and path.

    gamma - (1/n) sum_j (1 - b^-_j/m) g(b^-_j, j) - (1/m) sum_i h(i, b)
        <= - sum_i b_i / (m n)                                  one per b

    h(i, b) + (1 - j/n + b_i/n) g(i, j) - (1/n) sum_{k >= j} g(b^-_k, k)
        <= j/n + (1 - j/n + b_i/n)                  one per (i, b, b_i <= j <= n)

h(i, b) only depends on (i, b_i, b^-_{b_i..n-1}); dedupe_h=True keys the
h variables on that tuple, which shrinks the model without moving the optimum.
"""

import sys
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims, all_path_array, count_paths, inverse_vector
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


# =============================================================================
# SIZE
# =============================================================================

def h_row_count(dims: GridDims, paths: np.ndarray = None) -> int:
    """sum over b, i of (n - b_i + 1); closed form m |B| (n+2) / 2 for all of B."""
    m, n = dims.m, dims.n
    if paths is None:
        return m * count_paths(dims) * (n + 2) // 2
    return int((n + 1 - paths[:, :m]).sum())


def project_lower_size(dims: GridDims, paths: np.ndarray = None) -> dict:
    """Counts for the full model (paths=None) or a restricted one, h not deduplicated."""
    m, n = dims.m, dims.n
    num_paths = count_paths(dims) if paths is None else len(paths)
    h_rows = h_row_count(dims, paths)
    mono = monotone_row_count(dims)
    variables = 1 + m * n + m * num_paths
    constraints = num_paths + h_rows + mono
    nonzeros = num_paths * (1 + n + m) + h_rows * (2 + n) + 2 * mono
    return model_size_report(variables, constraints, nonzeros)


def h_key(i: int, b, jb) -> tuple:
    return (i, b[i], tuple(jb[b[i]:]))


# =============================================================================
# BUILD
# =============================================================================

def _build_lower(dims: GridDims, paths: np.ndarray, dedupe_h: bool, force: bool) -> LpProblem:
    m, n = dims.m, dims.n
    check_model_size(project_lower_size(dims, paths), force)

    builder = LpModelBuilder(dims, "lower")
    add_price_grid(builder)
    ranks = np.arange(n)

    # h columns, one per (i, b) or per distinct key
    h_columns = {}
    path_h = []
    inverses = []
    for b in paths.tolist():
        jb = inverse_vector(b, n)
        inverses.append(jb)
        cols = []
        for i in range(m):
            key = h_key(i, b, jb) if dedupe_h else (i, tuple(b))
            if key not in h_columns:
                h_columns[key] = (builder.add_variable(f"h_{len(h_columns)}"), i, b, jb)
            cols.append(h_columns[key][0])
        path_h.append(cols)

    # gamma rows
    for r, (b, jb, cols) in enumerate(zip(paths.tolist(), inverses, path_h)):
        jb_arr = np.asarray(jb)
        terms = {GAMMA_COLUMN: 1.0}
        inside = jb_arr < m
        for j, coef in zip(ranks[inside], ((1 - jb_arr / m) / n)[inside]):
            col = 1 + jb[j] * n + j
            terms[col] = terms.get(col, 0.0) - coef
        for col in cols:
            terms[col] = terms.get(col, 0.0) - 1.0 / m
        builder.add_constraint(f"gamma_{r}", terms, "L", -sum(b[:m]) / (m * n))

    # h rows, once per h column
    for col, i, b, jb in h_columns.values():
        _add_h_rows(builder, dims, col, i, b, jb)

    add_monotone_rows(builder)
    return builder.build({"b": paths})


def _add_h_rows(builder: LpModelBuilder, dims: GridDims, col: int, i: int, b, jb):
    m, n = dims.m, dims.n
    for j in range(b[i], n + 1):
        weight = 1 - j / n + b[i] / n
        rhs = j / n + weight
        terms = {col: 1.0}
        if j < n:
            terms[1 + i * n + j] = weight
        else:
            rhs -= weight  # g(i, n) = 1
        for k in range(j, n):
            if jb[k] < m:
                cell = 1 + jb[k] * n + k
                terms[cell] = terms.get(cell, 0.0) - 1.0 / n
        builder.add_constraint(f"hrow_{builder.num_rows}", terms, "L", rhs)


def build_lower_lp(dims: GridDims, dedupe_h: bool = False, force: bool = False,
                   verbose: bool = True) -> LpProblem:
    """The full lower LP over every path b."""
    check_model_size(project_lower_size(dims), force)
    problem = _build_lower(dims, all_path_array(dims), dedupe_h, force)
    if verbose:
        tag = ", h deduplicated" if dedupe_h else ""
        print_size_report(f"lower LP on {dims}{tag}", problem.size_report())
    return problem


def build_lower_lp_restricted(dims: GridDims, paths: ConstraintSet, dedupe_h: bool = False,
                              force: bool = False, verbose: bool = True) -> LpProblem:
    """Both constraint families instantiated only for b in `paths`."""
    if paths.family != "lower":
        raise ValueError(f"restricted lower LP needs a lower constraint set, got {paths.family}")
    if paths.dims != dims:
        raise ValueError(f"constraint set is on {paths.dims}, model is on {dims}")
    if len(paths) == 0:
        raise ValueError("restricted lower LP needs a non-empty path set")
    problem = _build_lower(dims, paths.key_arrays()["b"], dedupe_h, force)
    if verbose:
        print_size_report(f"lower LP(S), |S|={len(paths):,} on {dims}", problem.size_report())
    return problem


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    print("🚀 Lower LP sizes")
    print("=" * 50)
    for d in [GridDims(m, m) for m in range(1, 8)] + [GridDims(1, 100), GridDims(11, 12)]:
        r = project_lower_size(d)
        print(f"   {str(d):>6}: {r['variables']:>14,} vars, {r['constraints']:>14,} rows, "
              f"~{r['memory_gib']:.3f} GiB")
