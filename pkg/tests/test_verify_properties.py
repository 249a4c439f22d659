"""
Unit Tests for verify_properties.py
===================================
Small runs of every property suite, counterexample dumps and shrinking.
"""

import json
import sys
import tempfile
from pathlib import Path

# Add src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims
from ranksim.instance import InstanceParams, random_instance
import validate.verify_properties as properties
from validate.verify_properties import (
    DUAL_CHECK,
    SUITE_ALIASES,
    SUITES,
    SuiteResult,
    run_suite,
    shrink_instance,
    suite_counts,
    suite_duals,
    suite_sandwich,
    suite_thresholds,
    suite_witness,
)


# =============================================================================
# TESTS
# =============================================================================

def test_suite_names():
    assert sorted(SUITES) == ["counts", "duals", "sandwich", "thresholds", "witness"]


def test_counts_suite_passes():
    assert suite_counts(max_dim=4).passed


def test_sandwich_suite_passes():
    result = suite_sandwich(seed=1, trials=50, dims_list=[(3, 3), (2, 5)])
    assert result.passed
    assert sum(t for _, t in result.checks.values()) == 100


def test_threshold_and_dual_suites_pass():
    assert suite_thresholds(seed=4, instances=150).passed
    assert suite_duals(seed=4, instances=150).passed


def test_witness_suite_passes():
    assert suite_witness(seed=2, max_n=2).passed


def test_failed_check_dumps_counterexample():
    result = SuiteResult("demo", 7)
    result.record("always", True, {"x": 1})
    result.record("sometimes", False, {"x": 2})
    result.record("sometimes", False, {"x": 3})
    with tempfile.TemporaryDirectory() as tmp:
        assert result.report(dump_dir=tmp) is False
        with open(Path(tmp) / "demo_seed7.json") as f:
            dumped = json.load(f)
    assert dumped == {"suite": "demo", "seed": 7, "check": "sometimes", "x": 2}


def test_shrink_keeps_designated_edge():
    inst = random_instance(InstanceParams(GridDims(2, 2), num_offline=5, num_online=5,
                                          edge_probability=0.8), 1)
    u, v = inst.edges[0]

    def still_fails(candidate):
        return (u, v) in candidate.edges

    shrunk = shrink_instance(inst, u, v, still_fails)
    assert shrunk.edges == ((u, v),)
    assert [x.id for x in shrunk.online] == [u]
    assert [x.id for x in shrunk.offline] == [v]
    assert shrunk.designated == (u, v)


def test_suite_aliases_resolve():
    assert SUITE_ALIASES == {"lemma2": "thresholds", "lemma3": "duals"}
    assert run_suite("lemma2", seed=4, instances=20)
    assert run_suite("lemma3", seed=4, instances=20)


class _BrokenProfile:
    structure_valid = False
    beta_monotone = True


def test_duals_fail_when_thresholds_are_invalid():
    """An edge with no valid threshold profile cannot pass the dual check."""
    original = properties.extract_thresholds
    properties.extract_thresholds = lambda *args: _BrokenProfile()
    try:
        result = suite_duals(seed=4, instances=3)
    finally:
        properties.extract_thresholds = original
    assert not result.passed
    assert result.checks[DUAL_CHECK] == [0, 3]


def test_run_suite_rejects_unknown_name():
    try:
        run_suite("nonexistent")
        assert False, "unknown suite should raise"
    except ValueError:
        pass


# =============================================================================
# RUN
# =============================================================================

if __name__ == "__main__":
    # Simple test runner
    tests = [
        test_suite_names,
        test_counts_suite_passes,
        test_sandwich_suite_passes,
        test_threshold_and_dual_suites_pass,
        test_witness_suite_passes,
        test_failed_check_dumps_counterexample,
        test_shrink_keeps_designated_edge,
        test_suite_aliases_resolve,
        test_duals_fail_when_thresholds_are_invalid,
        test_run_suite_rejects_unknown_name,
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
