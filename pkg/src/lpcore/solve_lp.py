"""
Solve LP
========
One narrow contract for every backend: take an LpProblem, return an
LpSolution with status, objective, values, row activities and slacks.

Backends (RANKING_LP_SOLVER):
- highs: scipy.optimize.linprog(method="highs"), the default
- pulp:  PuLP driving the CBC binary
"""

import sys
import time
from pathlib import Path

import numpy as np
import pulp
import scipy.sparse as sp
from scipy.optimize import linprog

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from lpcore.export_mps import to_pulp
from lpcore.lp_model import LpProblem, LpSolution, row_slack
from utils.config import SOLVER_BACKEND, SOLVER_BACKENDS, SOLVER_TIME_LIMIT, SOLVER_TOLERANCE
from utils.errors import SolverBackendError

_HIGHS_STATUS = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}


# =============================================================================
# BACKENDS
# =============================================================================

def _solve_highs(problem: LpProblem, time_limit):
    A, senses, rhs = problem.A, problem.senses, problem.rhs
    le, ge, eq = senses == "L", senses == "G", senses == "E"

    A_ub = sp.vstack([A[le], -A[ge]]).tocsr()
    b_ub = np.concatenate([rhs[le], -rhs[ge]])
    c = np.zeros(problem.num_variables)
    c[problem.objective] = -1.0

    options = {"presolve": True, "primal_feasibility_tolerance": 1e-9,
               "dual_feasibility_tolerance": 1e-9}
    if time_limit:
        options["time_limit"] = float(time_limit)

    try:
        res = linprog(
            c,
            A_ub=A_ub if A_ub.shape[0] else None,
            b_ub=b_ub if A_ub.shape[0] else None,
            A_eq=A[eq] if eq.any() else None,
            b_eq=rhs[eq] if eq.any() else None,
            bounds=np.column_stack([problem.lower, problem.upper]),
            method="highs",
            options=options,
        )
    except (ValueError, MemoryError) as e:
        raise SolverBackendError("highs", str(e)) from e

    if res.status not in _HIGHS_STATUS:
        raise SolverBackendError("highs", f"status {res.status}: {res.message}")
    status = _HIGHS_STATUS[res.status]
    if status == "optimal":
        return status, -float(res.fun), np.asarray(res.x, dtype=float)
    return status, float("nan"), np.zeros(problem.num_variables)


def _solve_pulp(problem: LpProblem, time_limit):
    solver = pulp.PULP_CBC_CMD(msg=False, timeLimit=time_limit)
    if not solver.available():
        raise SolverBackendError("pulp", "CBC binary not available")
    prob, variables = to_pulp(problem)
    try:
        prob.solve(solver)
    except pulp.PulpSolverError as e:
        raise SolverBackendError("pulp", str(e)) from e

    if prob.status == pulp.LpStatusOptimal and prob.sol_status == pulp.LpSolutionOptimal:
        x = np.array([v.varValue if v.varValue is not None else 0.0 for v in variables])
        return "optimal", float(x[problem.objective]), x
    if prob.status == pulp.LpStatusInfeasible:
        return "infeasible", float("nan"), np.zeros(problem.num_variables)
    if prob.status == pulp.LpStatusUnbounded:
        return "unbounded", float("nan"), np.zeros(problem.num_variables)
    if prob.status in (pulp.LpStatusNotSolved, pulp.LpStatusOptimal):
        return "limit", float("nan"), np.zeros(problem.num_variables)
    raise SolverBackendError("pulp", f"status {pulp.LpStatus[prob.status]}")


_BACKENDS = {"highs": _solve_highs, "pulp": _solve_pulp}


# =============================================================================
# SOLVE
# =============================================================================

def solve(problem: LpProblem, backend: str = None, time_limit: float = None,
          verbose: bool = True) -> LpSolution:
    """
    Maximize gamma. Non-optimal outcomes come back as a status
    (infeasible / unbounded / limit); crashes and numerically bad answers
    raise SolverBackendError.
    """
    backend = backend or SOLVER_BACKEND
    if backend not in SOLVER_BACKENDS:
        raise SolverBackendError(backend, f"unknown backend, expected one of {SOLVER_BACKENDS}")
    time_limit = time_limit if time_limit is not None else SOLVER_TIME_LIMIT

    start = time.time()
    status, objective, x = _BACKENDS[backend](problem, time_limit)
    seconds = time.time() - start

    activity = problem.A @ x
    slack = row_slack(activity, problem.senses, problem.rhs)
    solution = LpSolution(status, objective, x, activity, slack, backend, seconds,
                          var_names=problem.var_names)

    if solution.is_optimal:
        worst = max(solution.max_violation(),
                    float(np.max(problem.lower - x, initial=0.0)),
                    float(np.max(x - problem.upper, initial=0.0)))
        if worst > SOLVER_TOLERANCE:
            raise SolverBackendError(backend, f"reported optimum violates the model by {worst:.2e}")

    if verbose:
        value = f"gamma = {objective:.6f}" if solution.is_optimal else "no value"
        print(f"📊 solve [{backend}] {problem.family} LP on {problem.dims}: {status}, {value} ({seconds:.2f}s)")
    return solution


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    from gridpaths.grid_paths import GridDims
    from lpcore.build_lower_lp import build_lower_lp
    from lpcore.build_upper_lp import build_upper_lp

    for m in (1, 2, 3):
        dims = GridDims(m, m)
        solve(build_lower_lp(dims))
        solve(build_upper_lp(dims))
