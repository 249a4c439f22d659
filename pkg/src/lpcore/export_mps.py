"""
Export MPS
==========
Bridge between LpProblem and PuLP, used for MPS files (export and
re-import) and for the CBC backend.

Names: variables "gamma", "g_i_j", "h_k"; rows "gamma_k", "hrow_k",
"mono_rank_i_j", "mono_stage_i_j". The objective is written with an explicit
OBJSENSE MAX section so external solvers maximize gamma.
"""

import sys
from pathlib import Path

import numpy as np
import pulp

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims
from lpcore.lp_model import LpModelBuilder, LpProblem

_PULP_SENSE = {"L": pulp.LpConstraintLE, "G": pulp.LpConstraintGE, "E": pulp.LpConstraintEQ}
_SENSE_FROM_PULP = {value: key for key, value in _PULP_SENSE.items()}


# =============================================================================
# TO / FROM PULP
# =============================================================================

def _bound(value):
    return None if not np.isfinite(value) else float(value)


def to_pulp(problem: LpProblem, name: str = None):
    """Returns (pulp problem, variables in column order)."""
    prob = pulp.LpProblem(name or f"{problem.family}_{problem.dims.m}x{problem.dims.n}", pulp.LpMaximize)
    variables = [
        pulp.LpVariable(var_name, lowBound=_bound(lo), upBound=_bound(hi))
        for var_name, lo, hi in zip(problem.var_names, problem.lower, problem.upper)
    ]
    prob += variables[problem.objective]
    prob.addVariables(variables)

    A = problem.A
    for r, row_name in enumerate(problem.row_names):
        start, end = A.indptr[r], A.indptr[r + 1]
        expr = pulp.LpAffineExpression(
            [(variables[c], float(v)) for c, v in zip(A.indices[start:end], A.data[start:end])]
        )
        prob.addConstraint(
            pulp.LpConstraint(expr, _PULP_SENSE[problem.senses[r]], row_name, float(problem.rhs[r])),
            row_name,
        )
    return prob, variables


def _variable_order(name: str):
    if name == "gamma":
        return (0, 0, 0)
    kind, *index = name.split("_")
    return (1 if kind == "g" else 2, *(int(x) for x in index), 0)[:3]


def from_pulp(prob: pulp.LpProblem, dims: GridDims, family: str) -> LpProblem:
    """
    Rebuild an LpProblem in the canonical column layout.

    Every g_i_j column is re-declared even when the file never mentions it
    (a cell no constraint touches).
    """
    m, n = dims.m, dims.n
    builder = LpModelBuilder(dims, family)
    found = {v.name: v for v in prob.variables()}
    builder.add_variable("gamma")
    for i in range(m):
        for j in range(n):
            var = found.get(f"g_{i}_{j}")
            lo = 0.0 if var is None or var.lowBound is None else var.lowBound
            hi = 1.0 if var is None or var.upBound is None else var.upBound
            builder.add_variable(f"g_{i}_{j}", lo, hi)
    for name in sorted((x for x in found if x.startswith("h_")), key=_variable_order):
        var = found[name]
        builder.add_variable(
            name,
            -np.inf if var.lowBound is None else var.lowBound,
            np.inf if var.upBound is None else var.upBound,
        )

    column = {name: c for c, name in enumerate(builder.var_names)}
    for row_name, constraint in prob.constraints.items():
        terms = {}
        for var, coef in constraint.items():
            terms[column[var.name]] = terms.get(column[var.name], 0.0) + coef
        builder.add_constraint(row_name, terms, _SENSE_FROM_PULP[constraint.sense], -constraint.constant)
    return builder.build()


# =============================================================================
# MPS FILES
# =============================================================================

def export_mps(problem: LpProblem, destination) -> Path:
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    prob, _ = to_pulp(problem)
    prob.writeMPS(str(path), with_objsense=True)
    print(f"💾 Saved {problem.num_variables:,} columns x {problem.num_constraints:,} rows to {path}")
    return path


def read_mps(source, dims: GridDims, family: str) -> LpProblem:
    path = Path(source)
    print(f"📥 Reading {path}...")
    _, prob = pulp.LpProblem.fromMPS(str(path), sense=pulp.LpMaximize)
    return from_pulp(prob, dims, family)


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    from lpcore.build_lower_lp import build_lower_lp

    model = build_lower_lp(GridDims(2, 2))
    export_mps(model, PROJECT_ROOT / "results" / "lower_2x2.mps")
