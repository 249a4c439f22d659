"""
Unit Tests for solution_files.py
================================
JSON solutions, table-row CSVs, iteration logs, checkpoints and instances.
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

# Add src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import eval_lower
from gamma.price_grid import PriceGrid, exponential_price_grid
from gridpaths.grid_paths import GridDims, enumerate_paths, parse_pair
from lpcore.build_upper_lp import all_pairs_set
from lpcore.lp_model import ConstraintSet
from persist.solution_files import (
    SolutionFile,
    TableRow,
    append_table_rows,
    format_table,
    load_checkpoint,
    load_constraint_set,
    load_instance,
    load_solution,
    pivot_table_rows,
    read_table_rows,
    reevaluate_gamma,
    save_checkpoint,
    save_instance,
    save_solution,
    solution_path,
    write_iteration_csv,
)
from ranksim.instance import InstanceParams, instance_to_dict, random_instance


def _raises(exc, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc:
        return True
    return False


def _lower_solution(dims: GridDims) -> SolutionFile:
    grid = exponential_price_grid(dims)
    S = ConstraintSet("lower", dims, enumerate_paths(dims))
    gamma = min(eval_lower(grid, b) for b in S)
    return SolutionFile("lower", dims, gamma, grid, S, "certified-lower", {"seed": 3})


# =============================================================================
# TESTS
# =============================================================================

def test_solution_round_trip_and_reevaluate():
    solution = _lower_solution(GridDims(2, 3))
    with tempfile.TemporaryDirectory() as tmp:
        path = save_solution(solution, solution_path(tmp, solution.mode, solution.dims))
        assert path.name == "certified-lower_2x3.json"
        loaded = load_solution(path)

    assert loaded.family == "lower" and loaded.mode == "certified-lower"
    assert loaded.dims == GridDims(2, 3)
    assert loaded.constraint_set == solution.constraint_set
    assert loaded.grid.allclose(solution.grid)
    assert loaded.provenance["seed"] == 3
    assert "generator_version" in loaded.provenance
    assert abs(reevaluate_gamma(loaded) - loaded.gamma) < 1e-9


def test_upper_solution_reevaluates_to_stored_min():
    dims = GridDims(2, 2)
    grid = exponential_price_grid(dims)
    S = all_pairs_set(dims)
    solution = SolutionFile("upper", dims, 0.0, grid, S, "exact-upper")
    restored = SolutionFile.from_dict(json.loads(json.dumps(solution.to_dict())))
    assert restored.constraint_set == S
    assert np.isclose(reevaluate_gamma(restored), reevaluate_gamma(solution))


def test_unknown_schema_rejected():
    data = _lower_solution(GridDims(1, 1)).to_dict()
    data["schema_version"] = 99
    assert _raises(ValueError, SolutionFile.from_dict, data)


def test_load_constraint_set_from_any_container():
    dims = GridDims(1, 1)
    S = ConstraintSet("upper", dims, [parse_pair("1,1|0,1")])
    with tempfile.TemporaryDirectory() as tmp:
        checkpoint = Path(tmp) / "cp.json"
        save_checkpoint(checkpoint, S, 0.9, [{"iteration": 0}])
        assert load_constraint_set(checkpoint) == S

        solution = _lower_solution(GridDims(2, 2))
        path = save_solution(solution, Path(tmp) / "s.json")
        assert load_constraint_set(path) == solution.constraint_set


def test_checkpoint_round_trip():
    dims = GridDims(2, 2)
    grid = exponential_price_grid(dims)
    S = all_pairs_set(dims)
    history = [{"iteration": 0, "gamma": 0.8, "set_size": len(S), "seconds": 0.1,
                "additions": 0, "removals": 0}]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "nested" / "upper_2x2.json"
        save_checkpoint(path, S, 0.8, history, grid)
        state = load_checkpoint(path)
        assert not path.with_suffix(".tmp").exists()
    assert state["constraint_set"] == S
    assert state["gamma_star"] == 0.8
    assert state["history"] == history
    assert state["grid"].allclose(grid)
    # without an accepted set the pending one stands in
    assert state["accepted_set"] == S
    assert state["accepted_grid"].allclose(grid)


def test_checkpoint_keeps_accepted_set_apart():
    dims = GridDims(2, 2)
    pending = all_pairs_set(dims)
    accepted = ConstraintSet("upper", dims, list(pending)[:2])
    grid = exponential_price_grid(dims)
    other = PriceGrid.from_interior(dims, [[0.5, 0.75], [0.25, 0.5]])
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "upper_2x2.json"
        save_checkpoint(path, pending, 0.8, [], grid, accepted, other)
        state = load_checkpoint(path)
    assert state["constraint_set"] == pending
    assert state["accepted_set"] == accepted
    assert state["accepted_grid"].allclose(other)
    assert state["grid"].allclose(grid)


def test_table_row_validation():
    assert _raises(ValueError, TableRow, 2, 2, 0.6, "made-up", 1.0)
    assert _raises(ValueError, TableRow, 2, 2, -0.1, "exact-lower", 1.0)
    assert _raises(ValueError, TableRow, 2, 2, float("nan"), "search-upper", 1.0)
    assert TableRow(2, 2, 0.625, "exact-lower", 0.3).mode == "exact-lower"


def test_table_csv_append_and_pivot():
    rows_a = [TableRow(2, 2, 0.625, "exact-lower", 0.1), TableRow(2, 2, 0.75, "exact-upper", 0.1)]
    rows_b = [TableRow(3, 3, 0.641723, "exact-lower", 0.4), TableRow(2, 2, 0.625001, "exact-lower", 0.2)]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "tables" / "table_rows.csv"
        append_table_rows(rows_a, path)
        df = append_table_rows(rows_b, path)
        assert len(df) == 4
        rows = read_table_rows(path)

    assert [r.mode for r in rows] == ["exact-lower", "exact-upper", "exact-lower", "exact-lower"]
    table = pivot_table_rows(rows)
    assert list(table.columns) == ["exact-lower", "exact-upper"]
    assert np.isclose(table.loc[(2, 2), "exact-lower"], 0.625001)   # latest row wins
    assert pd.isna(table.loc[(3, 3), "exact-upper"])
    assert list(pivot_table_rows(rows, [GridDims(3, 3)]).index) == [(3, 3)]
    assert "0.641723" in format_table(rows)


def test_iteration_csv_columns():
    history = [{"iteration": k, "gamma": 1.0 - k / 10, "set_size": 5 + k, "seconds": 0.01,
                "additions": k, "removals": 0} for k in range(3)]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "iterations.csv"
        write_iteration_csv(history, path)
        df = pd.read_csv(path)
    assert list(df.columns) == ["iteration", "gamma", "set_size", "seconds", "additions", "removals"]
    assert df["iteration"].tolist() == [0, 1, 2]


def test_instance_round_trip():
    inst = random_instance(InstanceParams(GridDims(2, 3), num_offline=4, num_online=5), 17)
    with tempfile.TemporaryDirectory() as tmp:
        path = save_instance(inst, Path(tmp) / "inst.json")
        loaded = load_instance(path)
    assert instance_to_dict(loaded) == instance_to_dict(inst)


# =============================================================================
# RUN
# =============================================================================

if __name__ == "__main__":
    # Simple test runner
    tests = [
        test_solution_round_trip_and_reevaluate,
        test_upper_solution_reevaluates_to_stored_min,
        test_unknown_schema_rejected,
        test_load_constraint_set_from_any_container,
        test_checkpoint_round_trip,
        test_checkpoint_keeps_accepted_set_apart,
        test_table_row_validation,
        test_table_csv_append_and_pivot,
        test_iteration_csv_columns,
        test_instance_round_trip,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
            passed += 1
        except AssertionError as e:
            print(f"❌ {test.__name__}: {e}")

    print(f"\n{'='*40}")
    print(f"Passed: {passed}/{len(tests)}")
