"""
Warm Start
==========
Starting constraint sets for local search on large grids.

Ladder for a target grid:
1. target small enough          -> every member, no search needed
2. target = base * 2^k, base <= WARM_START_EXACT_N
                                -> exact solve at base, keep binding rows,
                                   then double, searching each intermediate grid
3. anything else                -> exact solve at the clipped base, project
"""

import sys
from dataclasses import replace
from pathlib import Path

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims, PathPair, count_paths, enumerate_paths, project_path, upscale
from lpcore.build_lower_lp import build_lower_lp
from lpcore.build_upper_lp import all_pairs_set, build_upper_lp
from lpcore.lp_model import ConstraintSet, LpProblem, LpSolution
from lpcore.solve_lp import solve
from search.local_search import SearchOptions, local_search_lower, local_search_upper
from utils.config import HEURISTIC_FULL_START_PATHS, SOLVER_TOLERANCE, WARM_START_EXACT_N
from utils.errors import SolverBackendError


# =============================================================================
# SET TRANSFORMS
# =============================================================================

def _map_members(S: ConstraintSet, dims: GridDims, move) -> ConstraintSet:
    out = ConstraintSet(S.family, dims)
    for member in S:
        if S.family == "upper":
            out.add(PathPair(move(member.a), move(member.b)))
        else:
            out.add(move(member))
    return out


def warm_start(S: ConstraintSet) -> ConstraintSet:
    """Upscale every member onto the doubled grid; duplicates collapse."""
    return _map_members(S, S.dims.doubled(), upscale)


def project_set(S: ConstraintSet, dims: GridDims) -> ConstraintSet:
    """Project every member onto an arbitrary grid; dominance survives."""
    return _map_members(S, dims, lambda path: project_path(path, dims))


def all_members(family: str, dims: GridDims) -> ConstraintSet:
    if family == "upper":
        return all_pairs_set(dims)
    return ConstraintSet("lower", dims, enumerate_paths(dims))


# =============================================================================
# BINDING ROWS
# =============================================================================

def binding_set(problem: LpProblem, sol: LpSolution, tol: float = SOLVER_TOLERANCE) -> ConstraintSet:
    """Members whose Gamma row is tight at the optimum."""
    rows = sol.binding_rows(rows=slice(0, problem.num_gamma_rows), tol=tol)
    return ConstraintSet(problem.family, problem.dims, (problem.gamma_row_key(int(r)) for r in rows))


def exact_binding_set(family: str, dims: GridDims, backend: str = None,
                      verbose: bool = True) -> ConstraintSet:
    """Solve the full LP of `family` at `dims` and keep its binding members."""
    if family == "upper":
        problem = build_upper_lp(dims, verbose=verbose)
    else:
        problem = build_lower_lp(dims, verbose=verbose)
    sol = solve(problem, backend=backend, verbose=verbose)
    if not sol.is_optimal:
        raise SolverBackendError(sol.backend, f"exact {family} solve at {dims} ended '{sol.status}'")
    S = binding_set(problem, sol)
    if verbose:
        print(f"   {len(S):,} of {problem.num_gamma_rows:,} {family} rows binding at {dims}")
    return S


# =============================================================================
# LADDER
# =============================================================================

def ladder_base(dims: GridDims, exact_n: int = WARM_START_EXACT_N):
    """(base dims, number of doublings) or (clipped dims, None) when no doubling reaches dims."""
    m, n, k = dims.m, dims.n, 0
    while max(m, n) > exact_n and m % 2 == 0 and n % 2 == 0:
        m, n, k = m // 2, n // 2, k + 1
    if max(m, n) <= exact_n:
        return GridDims(m, n), k
    return GridDims(min(dims.m, exact_n), min(dims.n, exact_n)), None


def warm_start_ladder(family: str, dims: GridDims, opts=None, exact_n: int = WARM_START_EXACT_N) -> ConstraintSet:
    """Starting set for a search on `dims`, built bottom-up from an exact solve."""
    opts = opts or SearchOptions()
    if max(dims.m, dims.n) <= exact_n:
        return all_members(family, dims)

    base, doublings = ladder_base(dims, exact_n)
    if opts.verbose:
        plan = f"{doublings} doubling(s)" if doublings is not None else f"projection to {dims}"
        print(f"📊 Warm start: exact {family} solve at {base}, then {plan}")
    S = exact_binding_set(family, base, backend=opts.backend, verbose=opts.verbose)

    if doublings is None:
        return project_set(S, dims)

    for step in range(doublings):
        S = warm_start(S)
        if step < doublings - 1:
            search = local_search_upper if family == "upper" else local_search_lower
            S = search(S.dims, S, replace(opts, checkpoint_path=None)).constraint_set
    return S


def initial_lower_set(dims: GridDims, opts=None) -> ConstraintSet:
    """Every path when affordable, otherwise the ladder."""
    if count_paths(dims) <= HEURISTIC_FULL_START_PATHS:
        return all_members("lower", dims)
    return warm_start_ladder("lower", dims, opts)
