"""
Unit Tests for grid_paths.py
============================
Counting, enumeration order, inverse vectors, perturbations and refinement.
"""

import sys
from math import comb
from pathlib import Path

import numpy as np

# Add src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import (
    GridDims,
    MonotonePath,
    PathPair,
    all_path_array,
    count_pairs,
    count_paths,
    enumerate_pairs,
    enumerate_paths,
    inverse,
    inverse_block,
    neighbors,
    parse_pair,
    parse_path,
    path_at,
    path_blocks,
    path_from_inverse,
    path_index,
    perturb_pairs,
    project_path,
    step_value,
    upscale,
)
from utils.errors import InvalidPathError


def _raises(exc, fn, *args):
    try:
        fn(*args)
    except exc:
        return True
    return False


# =============================================================================
# TESTS
# =============================================================================

def test_count_paths_binomial():
    """Path counts are C(m+n, m), including the 11 x 12 grid."""
    for m in range(1, 9):
        for n in range(1, 9):
            assert count_paths(GridDims(m, n)) == comb(m + n, m)
    assert count_paths(GridDims(11, 12)) == 1352078


def test_enumerate_paths_matches_count_and_order():
    dims = GridDims(3, 4)
    paths = list(enumerate_paths(dims))
    assert len(paths) == count_paths(dims)
    assert paths == sorted(paths)
    assert paths[0].b == (0, 0, 0, 4)
    assert paths[-1].b == (4, 4, 4, 4)


def test_count_pairs_matches_enumeration():
    for m in range(1, 4):
        for n in range(1, 4):
            dims = GridDims(m, n)
            pairs = list(enumerate_pairs(dims))
            assert len(pairs) == count_pairs(dims)
            assert all(all(x >= y for x, y in zip(p.a.b, p.b.b)) for p in pairs)
    assert count_pairs(GridDims(1, 1)) == 3


def test_path_blocks_cover_stream():
    dims = GridDims(3, 3)
    stacked = np.concatenate(list(path_blocks(dims, 7)), axis=0)
    assert [tuple(row) for row in stacked.tolist()] == [p.b for p in enumerate_paths(dims)]
    assert np.array_equal(all_path_array(dims, 5), stacked)
    assert all_path_array(GridDims(2, 5)).shape == (count_paths(GridDims(2, 5)), 3)


def test_path_index_round_trip():
    dims = GridDims(3, 4)
    for k, path in enumerate(enumerate_paths(dims)):
        assert path_index(path) == k
        assert path_at(dims, k) == path
    assert _raises(IndexError, path_at, dims, count_paths(dims))


def test_inverse_vector():
    """b = (0,2,3,4) on 3 x 4 has b^- = (1,1,2,3)."""
    path = MonotonePath(GridDims(3, 4), (0, 2, 3, 4))
    assert inverse(path).jb == (1, 1, 2, 3)
    for p in enumerate_paths(GridDims(3, 3)):
        assert path_from_inverse(inverse(p)) == p


def test_inverse_block_matches_scalar():
    dims = GridDims(2, 5)
    block = next(path_blocks(dims, 1000))
    expected = [inverse(MonotonePath(dims, tuple(row))).jb for row in block.tolist()]
    assert [tuple(r) for r in inverse_block(block, dims.n).tolist()] == expected


def test_invalid_paths_rejected():
    dims = GridDims(2, 2)
    assert _raises(InvalidPathError, MonotonePath, dims, (0, 1, 1))   # must end at n
    assert _raises(InvalidPathError, MonotonePath, dims, (2, 1, 2))   # decreasing
    assert _raises(InvalidPathError, MonotonePath, dims, (0, 2))      # wrong length
    low = MonotonePath(dims, (0, 1, 2))
    high = MonotonePath(dims, (1, 1, 2))
    assert _raises(InvalidPathError, PathPair, low, high)             # a < b somewhere
    assert _raises(InvalidPathError, GridDims, 0, 3)


def test_neighbors_single_square():
    dims = GridDims(1, 1)
    assert neighbors(MonotonePath(dims, (0, 1))) == [MonotonePath(dims, (1, 1))]

    path = MonotonePath(GridDims(3, 4), (1, 2, 2, 4))
    for other in neighbors(path):
        assert sum(abs(x - y) for x, y in zip(path.b, other.b)) == 1
    assert neighbors(path) == sorted(neighbors(path))

    expected = {(1, 2, 3, 4), (0, 1, 3, 4), (0, 3, 3, 4), (0, 2, 2, 4), (0, 2, 4, 4)}
    assert {p.b for p in neighbors(MonotonePath(GridDims(3, 4), (0, 2, 3, 4)))} == expected
    assert neighbors(MonotonePath(GridDims(2, 2), (0, 0, 2))) == [MonotonePath(GridDims(2, 2), (0, 1, 2))]


def test_neighbors_symmetric():
    for dims in [GridDims(3, 3), GridDims(2, 4)]:
        for path in enumerate_paths(dims):
            for other in neighbors(path):
                assert path in neighbors(other), (path, other)


def test_perturb_pairs_keeps_dominance():
    pair = parse_pair("1,1|0,1")
    result = perturb_pairs(pair)
    assert set(map(str, result)) == {"0,1|0,1", "1,1|1,1"}
    for p in perturb_pairs(parse_pair("2,3,4,4|1,2,2,4")):
        assert all(x >= y for x, y in zip(p.a.b, p.b.b))


def test_upscale_doubling_rule():
    path = MonotonePath(GridDims(3, 4), (0, 2, 3, 4))
    up = upscale(path)
    assert up.dims == GridDims(6, 8)
    assert up.b == (0, 0, 4, 4, 6, 6, 8)
    # same step function on a mesh of cell midpoints
    for k in range(4 * 3):
        x = (k + 0.5) / (4 * 3)
        assert step_value(path, x) == step_value(up, x)


def test_project_path_generalizes_upscale():
    dims = GridDims(3, 4)
    for path in enumerate_paths(dims):
        assert project_path(path, dims.doubled()) == upscale(path)
        assert project_path(path, dims) == path
    # dominance survives an arbitrary projection
    target = GridDims(5, 7)
    for pair in enumerate_pairs(GridDims(2, 3)):
        a, b = project_path(pair.a, target), project_path(pair.b, target)
        assert all(x >= y for x, y in zip(a.b, b.b))


def test_parse_path_and_pair():
    path = parse_path("0,2,3,4")
    assert path.dims == GridDims(3, 4)
    assert str(path) == "0,2,3,4"
    pair = parse_pair("2,2,2|0,0,2")
    assert pair.dims == GridDims(2, 2)
    assert str(pair) == "2,2,2|0,0,2"
    assert _raises(InvalidPathError, parse_path, "3")


# =============================================================================
# RUN
# =============================================================================

if __name__ == "__main__":
    # Simple test runner
    tests = [
        test_count_paths_binomial,
        test_enumerate_paths_matches_count_and_order,
        test_count_pairs_matches_enumeration,
        test_path_blocks_cover_stream,
        test_path_index_round_trip,
        test_inverse_vector,
        test_inverse_block_matches_scalar,
        test_invalid_paths_rejected,
        test_neighbors_single_square,
        test_neighbors_symmetric,
        test_perturb_pairs_keeps_dominance,
        test_upscale_doubling_rule,
        test_project_path_generalizes_upscale,
        test_parse_path_and_pair,
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
