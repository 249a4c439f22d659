"""
Solution Files
==============
Everything written to disk:

- SolutionFile (JSON): gamma, price grid, constraint set, provenance
- TableRow (CSV):      one line per (m, n, mode) result
- iteration log (CSV): one line per local-search iteration
- checkpoints (JSON):  search state for resumption
- instances (JSON):    ranking simulator instances
"""

import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import eval_lower_batch, eval_upper_batch
from gamma.price_grid import PriceGrid
from gridpaths.grid_paths import GridDims, parse_pair, parse_path
from lpcore.lp_model import ConstraintSet
from ranksim.instance import BipartiteInstance, instance_from_dict, instance_to_dict
from utils.config import (
    FLOAT_FORMAT,
    GENERATOR_VERSION,
    ITERATION_COLUMNS,
    SOLUTION_SCHEMA_VERSION,
    TABLE_COLUMNS,
    TABLE_MODES,
)


# =============================================================================
# CONSTRAINT SETS
# =============================================================================

def constraint_set_to_dict(S: ConstraintSet) -> dict:
    return {"family": S.family, "m": S.dims.m, "n": S.dims.n, "members": S.to_strings()}


def constraint_set_from_dict(data: dict) -> ConstraintSet:
    dims = GridDims(data["m"], data["n"])
    parse = parse_pair if data["family"] == "upper" else parse_path
    return ConstraintSet(data["family"], dims, (parse(text) for text in data["members"]))


def load_constraint_set(path) -> ConstraintSet:
    """A SolutionFile, a checkpoint, or a bare constraint-set JSON."""
    with open(path) as f:
        data = json.load(f)
    if "constraint_set" in data:
        data = data["constraint_set"]
    return constraint_set_from_dict(data)


# =============================================================================
# SOLUTION FILE
# =============================================================================

@dataclass(eq=False)
class SolutionFile:
    family: str
    dims: GridDims
    gamma: float
    grid: PriceGrid
    constraint_set: ConstraintSet
    mode: str
    provenance: dict = field(default_factory=dict)
    schema_version: int = SOLUTION_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "family": self.family,
            "mode": self.mode,
            "m": self.dims.m,
            "n": self.dims.n,
            "gamma": self.gamma,
            "g": self.grid.to_rows(),
            "constraint_set": constraint_set_to_dict(self.constraint_set),
            "provenance": {"generator_version": GENERATOR_VERSION, **self.provenance},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolutionFile":
        if data.get("schema_version") != SOLUTION_SCHEMA_VERSION:
            raise ValueError(f"unsupported solution schema {data.get('schema_version')}")
        dims = GridDims(data["m"], data["n"])
        return cls(
            family=data["family"],
            dims=dims,
            gamma=float(data["gamma"]),
            grid=PriceGrid.from_rows(dims, data["g"]),
            constraint_set=constraint_set_from_dict(data["constraint_set"]),
            mode=data["mode"],
            provenance=data.get("provenance", {}),
        )


def reevaluate_gamma(solution: SolutionFile) -> float:
    """min over the stored set of L (lower) or U (upper) at the stored grid."""
    keys = solution.constraint_set.key_arrays()
    if solution.family == "upper":
        values = eval_upper_batch(solution.grid, keys["a"], keys["b"])
    else:
        values = eval_lower_batch(solution.grid, keys["b"])
    return float(values.min())


def save_solution(solution: SolutionFile, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(solution.to_dict(), f, indent=1)
    print(f"💾 Saved {solution.family} solution (gamma = {solution.gamma:.6f}) to {path}")
    return path


def load_solution(path) -> SolutionFile:
    print(f"📥 Reading {path}...")
    with open(path) as f:
        return SolutionFile.from_dict(json.load(f))


def solution_path(directory, mode: str, dims: GridDims) -> Path:
    return Path(directory) / f"{mode}_{dims.m}x{dims.n}.json"


# =============================================================================
# TABLE ROWS
# =============================================================================

@dataclass(frozen=True)
class TableRow:
    m: int
    n: int
    value: float
    mode: str
    runtime_seconds: float

    def __post_init__(self):
        if self.mode not in TABLE_MODES:
            raise ValueError(f"unknown table mode '{self.mode}'")
        if not np.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"table value {self.value} is not a finite non-negative number")


def append_table_rows(rows, path) -> pd.DataFrame:
    """Append to the CSV (created with a header when missing)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df_new = pd.DataFrame([asdict(r) for r in rows], columns=TABLE_COLUMNS)
    if path.exists():
        df = pd.concat([pd.read_csv(path), df_new], ignore_index=True)
    else:
        df = df_new
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    print(f"💾 Saved {len(df_new):,} table rows to {path}")
    return df


def read_table_rows(path) -> list:
    df = pd.read_csv(path)
    return [TableRow(int(r.m), int(r.n), float(r.value), r.mode, float(r.runtime_seconds))
            for r in df.itertuples(index=False)]


def format_table(rows) -> str:
    """Fixed-width text layout, values to 6 decimals."""
    df = pd.DataFrame([asdict(r) for r in rows], columns=TABLE_COLUMNS)
    return df.to_string(index=False, float_format=lambda x: f"{x:.6f}")


def pivot_table_rows(rows, dims=None) -> pd.DataFrame:
    """One line per (m, n), one column per mode; the latest row of each (m, n, mode) wins."""
    df = pd.DataFrame([asdict(r) for r in rows], columns=TABLE_COLUMNS)
    df = df.drop_duplicates(subset=["m", "n", "mode"], keep="last")
    if dims is not None:
        wanted = {(d.m, d.n) for d in dims}
        df = df[[(m, n) in wanted for m, n in zip(df["m"], df["n"])]]
    modes = [mode for mode in TABLE_MODES if mode in set(df["mode"])]
    return df.pivot(index=["m", "n"], columns="mode", values="value").reindex(columns=modes)


# =============================================================================
# ITERATION LOG
# =============================================================================

def write_iteration_csv(history, path) -> pd.DataFrame:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(list(history), columns=ITERATION_COLUMNS)
    df.to_csv(path, index=False, float_format="%.9f")
    print(f"💾 Saved {len(df):,} iterations to {path}")
    return df


# =============================================================================
# CHECKPOINTS
# =============================================================================

def save_checkpoint(path, S: ConstraintSet, gamma_star: float, history, grid: PriceGrid = None,
                    accepted: ConstraintSet = None, accepted_grid: PriceGrid = None):
    """
    S is the pending set after the last sweep. accepted / accepted_grid are the
    set and grid gamma_star was read from; they default to the pending ones.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state = {
        "schema_version": SOLUTION_SCHEMA_VERSION,
        "gamma_star": gamma_star,
        "history": list(history),
        "constraint_set": constraint_set_to_dict(S),
        "g": None if grid is None else grid.to_rows(),
        "accepted_set": None if accepted is None else constraint_set_to_dict(accepted),
        "accepted_g": None if accepted_grid is None else accepted_grid.to_rows(),
    }
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as f:
        json.dump(state, f)
    tmp.replace(path)


def load_checkpoint(path) -> dict:
    with open(path) as f:
        state = json.load(f)
    S = constraint_set_from_dict(state["constraint_set"])
    grid = None if state["g"] is None else PriceGrid.from_rows(S.dims, state["g"])
    accepted = state.get("accepted_set")
    accepted_g = state.get("accepted_g")
    return {
        "constraint_set": S,
        "gamma_star": float(state["gamma_star"]),
        "history": [dict(h) for h in state["history"]],
        "grid": grid,
        "accepted_set": S.copy() if accepted is None else constraint_set_from_dict(accepted),
        "accepted_grid": grid if accepted_g is None else PriceGrid.from_rows(S.dims, accepted_g),
    }


# =============================================================================
# INSTANCES
# =============================================================================

def save_instance(inst: BipartiteInstance, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(instance_to_dict(inst), f, indent=1)
    print(f"💾 Saved instance ({len(inst.offline)}+{len(inst.online)} vertices) to {path}")
    return path


def load_instance(path) -> BipartiteInstance:
    with open(path) as f:
        return instance_from_dict(json.load(f))

