"""
LP Model
========
Backend-agnostic LP data: LpProblem (what to solve), LpSolution (what came
back), ConstraintSet (which paths / pairs instantiate the Gamma rows) and
LpModelBuilder (row-by-row or block-wise construction).

Column layout shared by both families:
    0                       gamma (maximized)
    1 + i*n + j             g(i, j), i < m, j < n
    1 + m*n ...             family specific (h variables for the lower LP)

Boundary cells g(i, n) = 1 and g(m, j) = 0 are folded into right-hand sides.
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims, MonotonePath, PathPair
from utils.config import (
    BYTES_PER_NONZERO,
    BYTES_PER_ROW,
    GENERATOR_VERSION,
    MODEL_MEMORY_CAP_GIB,
    SOLVER_TOLERANCE,
)
from utils.errors import InvalidPathError, ModelTooLargeError

GAMMA_COLUMN = 0
SENSES = ("L", "G", "E")
FAMILIES = ("lower", "upper")
STATUSES = ("optimal", "infeasible", "unbounded", "limit")


# =============================================================================
# COLUMN LAYOUT
# =============================================================================

def grid_column(dims: GridDims, i, j):
    """Column of the free variable g(i, j); works on scalars and arrays."""
    return 1 + i * dims.n + j


def is_boundary_cell(dims: GridDims, i, j):
    return (i == dims.m) | (j == dims.n)


def boundary_value(dims: GridDims, j):
    """g(i, n) = 1 for every i, g(m, j) = 0 below the top rank."""
    return np.where(np.asarray(j) == dims.n, 1.0, 0.0)


# =============================================================================
# TYPES
# =============================================================================

@dataclass(eq=False)
class LpProblem:
    dims: GridDims
    family: str
    var_names: list
    lower: np.ndarray
    upper: np.ndarray
    A: sp.csr_matrix
    senses: np.ndarray          # 'L' (<=), 'G' (>=), 'E' (=)
    rhs: np.ndarray
    row_names: list
    objective: int = GAMMA_COLUMN
    generator_version: str = GENERATOR_VERSION
    # Gamma rows come first; keys["b"] (and keys["a"] for upper) hold their
    # paths as int arrays of shape (rows, m+1)
    keys: dict = field(default_factory=dict)

    @property
    def num_variables(self) -> int:
        return len(self.var_names)

    @property
    def num_constraints(self) -> int:
        return len(self.row_names)

    @property
    def nonzeros(self) -> int:
        return int(self.A.nnz)

    @property
    def num_gamma_rows(self) -> int:
        return 0 if "b" not in self.keys else int(len(self.keys["b"]))

    def gamma_row_key(self, row: int):
        """The path (lower) or pair (upper) behind Gamma row `row`."""
        b = MonotonePath(self.dims, tuple(self.keys["b"][row]))
        if self.family == "lower":
            return b
        return PathPair(MonotonePath(self.dims, tuple(self.keys["a"][row])), b)

    def size_report(self) -> dict:
        return model_size_report(self.num_variables, self.num_constraints, self.nonzeros)

    def coefficient_map(self) -> dict:
        """{(row name, variable name): coefficient} for structural comparisons."""
        coo = self.A.tocoo()
        return {(self.row_names[r], self.var_names[c]): float(v)
                for r, c, v in zip(coo.row, coo.col, coo.data) if v != 0.0}

    def validate(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown LP family '{self.family}'")
        if self.A.shape != (self.num_constraints, self.num_variables):
            raise ValueError(f"matrix shape {self.A.shape} does not match "
                             f"{self.num_constraints} rows x {self.num_variables} columns")
        if not set(np.unique(self.senses)) <= set(SENSES):
            raise ValueError(f"unknown row senses {set(np.unique(self.senses)) - set(SENSES)}")
        if not (np.all(np.isfinite(self.A.data)) and np.all(np.isfinite(self.rhs))):
            raise ValueError("model has non-finite coefficients")


@dataclass(eq=False)
class LpSolution:
    status: str
    objective: float
    x: np.ndarray
    activity: np.ndarray
    slack: np.ndarray           # >= 0 when satisfied, for every sense
    backend: str
    seconds: float
    var_names: list = field(default_factory=list)

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    def value(self, name: str) -> float:
        return float(self.x[self.var_names.index(name)])

    def binding_rows(self, rows=None, tol: float = SOLVER_TOLERANCE) -> np.ndarray:
        """Indices (within `rows`, default all) whose slack is at most tol."""
        slack = self.slack if rows is None else self.slack[rows]
        return np.flatnonzero(slack <= tol)

    def max_violation(self) -> float:
        return float(max(0.0, -self.slack.min())) if self.slack.size else 0.0


def row_slack(activity: np.ndarray, senses: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return np.where(senses == "L", rhs - activity,
                    np.where(senses == "G", activity - rhs, -np.abs(activity - rhs)))


# =============================================================================
# CONSTRAINT SET
# =============================================================================

class ConstraintSet:
    """
    Ordered, duplicate-free set of PathPair (family "upper") or
    MonotonePath (family "lower") on one grid. Iteration follows insertion.
    """

    def __init__(self, family: str, dims: GridDims, members=()):
        if family not in FAMILIES:
            raise ValueError(f"unknown constraint family '{family}'")
        self.family = family
        self.dims = dims
        self._members = {}
        for member in members:
            self.add(member)

    def _check(self, member):
        kind = PathPair if self.family == "upper" else MonotonePath
        if not isinstance(member, kind):
            raise InvalidPathError(f"{self.family} set holds {kind.__name__}, got {type(member).__name__}")
        if member.dims != self.dims:
            raise InvalidPathError(f"member {member} is on {member.dims}, set is on {self.dims}")

    def add(self, member) -> bool:
        """Insert; returns False when already present."""
        self._check(member)
        if member in self._members:
            return False
        self._members[member] = None
        return True

    def discard(self, member):
        self._members.pop(member, None)

    def copy(self) -> "ConstraintSet":
        return ConstraintSet(self.family, self.dims, self._members)

    def __contains__(self, member):
        return member in self._members

    def __iter__(self):
        return iter(list(self._members))

    def __len__(self):
        return len(self._members)

    def __eq__(self, other):
        return (isinstance(other, ConstraintSet) and self.family == other.family
                and self.dims == other.dims and set(self._members) == set(other._members))

    def key_arrays(self) -> dict:
        """Members as int arrays: {"b": (k, m+1)} plus "a" for pairs."""
        members = list(self._members)
        width = self.dims.m + 1
        if self.family == "lower":
            return {"b": np.array([p.b for p in members], dtype=np.int64).reshape(-1, width)}
        return {
            "a": np.array([p.a.b for p in members], dtype=np.int64).reshape(-1, width),
            "b": np.array([p.b.b for p in members], dtype=np.int64).reshape(-1, width),
        }

    def to_strings(self) -> list:
        return [str(member) for member in self._members]

    def __repr__(self):
        return f"ConstraintSet({self.family}, {self.dims}, {len(self)} members)"


# =============================================================================
# BUILDER
# =============================================================================

class LpModelBuilder:
    """Accumulates columns and COO triplets; duplicates are summed on build."""

    def __init__(self, dims: GridDims, family: str):
        self.dims = dims
        self.family = family
        self.var_names = []
        self.lower = []
        self.upper = []
        self._rows, self._cols, self._vals = [], [], []
        self.senses = []
        self.rhs = []
        self.row_names = []

    @property
    def num_rows(self) -> int:
        return len(self.row_names)

    def add_variable(self, name: str, lower=-np.inf, upper=np.inf) -> int:
        self.var_names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        return len(self.var_names) - 1

    def add_variables(self, names, lower=-np.inf, upper=np.inf) -> np.ndarray:
        start = len(self.var_names)
        for name in names:
            self.add_variable(name, lower, upper)
        return np.arange(start, len(self.var_names))

    def add_constraint(self, name: str, terms: dict, sense: str, rhs: float) -> int:
        """terms maps column -> coefficient."""
        row = self.num_rows
        cols = np.fromiter(terms.keys(), dtype=np.int64, count=len(terms))
        vals = np.fromiter(terms.values(), dtype=float, count=len(terms))
        self._rows.append(np.full(len(cols), row, dtype=np.int64))
        self._cols.append(cols)
        self._vals.append(vals)
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self.row_names.append(name)
        return row

    def add_block(self, rows, cols, vals, senses, rhs, names):
        """Append k rows at once; `rows` indexes 0..k-1 within the block."""
        offset = self.num_rows
        self._rows.append(np.asarray(rows, dtype=np.int64) + offset)
        self._cols.append(np.asarray(cols, dtype=np.int64))
        self._vals.append(np.asarray(vals, dtype=float))
        self.senses.extend(senses)
        self.rhs.extend(np.asarray(rhs, dtype=float).tolist())
        self.row_names.extend(names)

    def build(self, keys=None) -> LpProblem:
        shape = (self.num_rows, len(self.var_names))
        if self._rows:
            rows, cols, vals = (np.concatenate(x) for x in (self._rows, self._cols, self._vals))
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0)
        A = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
        A.sum_duplicates()
        A.eliminate_zeros()
        problem = LpProblem(
            dims=self.dims,
            family=self.family,
            var_names=list(self.var_names),
            lower=np.array(self.lower, dtype=float),
            upper=np.array(self.upper, dtype=float),
            A=A,
            senses=np.array(self.senses, dtype="<U1"),
            rhs=np.array(self.rhs, dtype=float),
            row_names=list(self.row_names),
            keys=dict(keys or {}),
        )
        problem.validate()
        return problem


def add_price_grid(builder: LpModelBuilder) -> np.ndarray:
    """gamma then g(i, j) for i < m, j < n, in the fixed column layout."""
    m, n = builder.dims.m, builder.dims.n
    builder.add_variable("gamma")
    names = [f"g_{i}_{j}" for i in range(m) for j in range(n)]
    return builder.add_variables(names, 0.0, 1.0)


def add_monotone_rows(builder: LpModelBuilder):
    """g non-decreasing in rank and non-increasing in stage, interior cells only."""
    dims = builder.dims
    m, n = dims.m, dims.n
    for i in range(m):
        for j in range(n - 1):
            builder.add_constraint(
                f"mono_rank_{i}_{j}",
                {grid_column(dims, i, j): 1.0, grid_column(dims, i, j + 1): -1.0}, "L", 0.0)
    for i in range(m - 1):
        for j in range(n):
            builder.add_constraint(
                f"mono_stage_{i}_{j}",
                {grid_column(dims, i + 1, j): 1.0, grid_column(dims, i, j): -1.0}, "L", 0.0)


def monotone_row_count(dims: GridDims) -> int:
    return dims.m * (dims.n - 1) + (dims.m - 1) * dims.n


# =============================================================================
# SIZE PROJECTION
# =============================================================================

def model_size_report(variables: int, constraints: int, nonzeros: int) -> dict:
    memory = nonzeros * BYTES_PER_NONZERO + constraints * BYTES_PER_ROW + variables * BYTES_PER_ROW
    return {
        "variables": int(variables),
        "constraints": int(constraints),
        "nonzeros": int(nonzeros),
        "memory_gib": memory / 2 ** 30,
    }


def check_model_size(report: dict, force: bool = False, cap_gib: float = MODEL_MEMORY_CAP_GIB):
    if report["memory_gib"] > cap_gib and not force:
        raise ModelTooLargeError(report, cap_gib)


def print_size_report(label: str, report: dict):
    print(f"📊 {label}: {report['variables']:,} variables, {report['constraints']:,} constraints, "
          f"{report['nonzeros']:,} nonzeros (~{report['memory_gib']:.3f} GiB)")
