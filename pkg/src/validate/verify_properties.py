"""
Property Suites
===============
Randomized and exhaustive checks of the bound machinery.

    counts      path / pair counts against the binomial formulas
    sandwich    L(g, b) <= Gamma(g, a, b) <= U(g, a, b) on random grids and pairs
    thresholds  (alias lemma2) three-interval outcome structure and non-decreasing beta
    duals       (alias lemma3) E[t_u + t_v] >= Gamma(g, alpha, beta) w_v by exhaustive replay;
                an edge without valid thresholds fails this check too
    witness     the gadget instance reproduces every dominant pair

Each suite prints one line per check, a summary, and on failure dumps the
first (shrunk) counterexample as JSON.
"""

import json
import sys
from math import comb
from pathlib import Path

import numpy as np

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import eval_lower, eval_upper, gamma_exact
from gamma.price_grid import random_pair, random_price_grid
from gridpaths.grid_paths import (
    GridDims,
    count_pairs,
    count_paths,
    enumerate_pairs,
    enumerate_paths,
)
from ranksim.build_witness import U_ID, build_witness
from ranksim.extract_thresholds import expected_duals, extract_thresholds
from ranksim.instance import BipartiteInstance, InstanceParams, instance_to_dict, random_instance
from utils.config import (
    COUNTEREXAMPLES_SUBDIR,
    COUNTS_SUITE_MAX,
    DEFAULT_SEED,
    EDGE_SUITE_INSTANCES,
    RESULTS_DIR,
    SANDWICH_SUITE_DIMS,
    SANDWICH_SUITE_TRIALS,
    SANDWICH_TOLERANCE,
    WITNESS_SUITE_MAX_N,
)
from utils.errors import InvalidPathError

EDGE_MAX_DIM = 4
EDGE_MAX_SIDE = 6

STRUCTURE_CHECK = "three-interval structure"
MONOTONE_CHECK = "beta non-decreasing"
DUAL_CHECK = "E[t_u + t_v] >= Gamma w_v"


# =============================================================================
# REPORTING
# =============================================================================

class SuiteResult:
    """Collects checks; the first failure of each check keeps its counterexample."""

    def __init__(self, name: str, seed: int):
        self.name = name
        self.seed = seed
        self.checks = {}       # check -> [passed, total]
        self.counterexample = None

    def record(self, check: str, ok: bool, example=None):
        tally = self.checks.setdefault(check, [0, 0])
        tally[0] += int(ok)
        tally[1] += 1
        if not ok and self.counterexample is None and example is not None:
            self.counterexample = {"check": check, **example}

    @property
    def passed(self) -> bool:
        return all(p == t for p, t in self.checks.values())

    def report(self, dump_dir=None) -> bool:
        print(f"🔍 Suite '{self.name}' (seed {self.seed}):")
        print("-" * 40)
        for check, (p, t) in self.checks.items():
            mark = "✅" if p == t else "❌"
            print(f"{mark} {check}: {p:,}/{t:,} pass")
        print("-" * 40)
        if self.passed:
            print(f"✅ All {self.name} checks passed!")
            return True
        failed = sum(p != t for p, t in self.checks.values())
        print(f"❌ {failed} {self.name} check(s) failed")
        if self.counterexample is not None:
            self.dump(dump_dir)
        return False

    def dump(self, dump_dir) -> Path:
        dump_dir = Path(dump_dir or PROJECT_ROOT / RESULTS_DIR / COUNTEREXAMPLES_SUBDIR)
        path = dump_dir / f"{self.name}_seed{self.seed}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump({"suite": self.name, "seed": self.seed, **self.counterexample}, f, indent=1)
        print(f"💾 Saved counterexample to {path}")
        return path


# =============================================================================
# SUITES
# =============================================================================

def suite_counts(seed: int = DEFAULT_SEED, max_dim: int = COUNTS_SUITE_MAX) -> SuiteResult:
    result = SuiteResult("counts", seed)
    for m in range(1, max_dim + 1):
        for n in range(1, max_dim + 1):
            dims = GridDims(m, n)
            counted = count_paths(dims)
            example = {"m": m, "n": n, "counted": counted}
            result.record("count_paths == C(m+n, m)", counted == comb(m + n, m), example)
            enumerated = sum(1 for _ in enumerate_paths(dims))
            result.record("enumerate_paths size", enumerated == counted, {**example, "enumerated": enumerated})
            if m <= 4 and n <= 4:
                pairs = sum(1 for _ in enumerate_pairs(dims))
                result.record("count_pairs == enumerated pairs", pairs == count_pairs(dims),
                              {"m": m, "n": n, "counted": count_pairs(dims), "enumerated": pairs})
    big = count_paths(GridDims(11, 12))
    result.record("C(23, 11) = 1352078", big == 1352078, {"m": 11, "n": 12, "counted": big})
    return result


def suite_sandwich(seed: int = DEFAULT_SEED, trials: int = SANDWICH_SUITE_TRIALS,
                   dims_list=SANDWICH_SUITE_DIMS) -> SuiteResult:
    result = SuiteResult("sandwich", seed)
    rng = np.random.default_rng(seed)
    for m, n in dims_list:
        dims = GridDims(m, n)
        for _ in range(trials):
            grid = random_price_grid(dims, rng, strict=bool(rng.integers(2)))
            pair = random_pair(dims, rng)
            low, mid, high = eval_lower(grid, pair.b), gamma_exact(grid, pair).total, eval_upper(grid, pair)
            example = {"m": m, "n": n, "g": grid.to_rows(), "pair": str(pair),
                       "lower": low, "exact": mid, "upper": high}
            result.record(f"L <= Gamma <= U on {dims}",
                          low <= mid + SANDWICH_TOLERANCE and mid <= high + SANDWICH_TOLERANCE, example)
    return result


def _random_edge_case(rng: np.random.Generator):
    """A random instance with at least one edge, a strict grid, and a chosen edge."""
    while True:
        dims = GridDims(int(rng.integers(1, EDGE_MAX_DIM + 1)), int(rng.integers(1, EDGE_MAX_DIM + 1)))
        params = InstanceParams(
            dims,
            num_offline=int(rng.integers(1, EDGE_MAX_SIDE + 1)),
            num_online=int(rng.integers(1, EDGE_MAX_SIDE + 1)),
            edge_probability=float(rng.uniform(0.2, 0.8)),
            weighted=bool(rng.integers(2)),
        )
        inst = random_instance(params, int(rng.integers(2**31)))
        if inst.edges:
            u, v = inst.edges[int(rng.integers(len(inst.edges)))]
            return inst, u, v, random_price_grid(dims, rng, strict=True)


def _edge_failures(inst, u, v, grid) -> list:
    profile = extract_thresholds(inst, u, v, grid)
    failures = []
    if not profile.structure_valid:
        failures.append(STRUCTURE_CHECK)
    if not profile.beta_monotone:
        failures.append(MONOTONE_CHECK)
    if failures:
        # no Gamma to compare against: the dual check fails with them
        failures.append(DUAL_CHECK)
        return failures
    bound = profile.gamma(grid).total * inst.offline_vertex(v).weight
    if expected_duals(inst, u, v, grid) < bound - SANDWICH_TOLERANCE:
        failures.append(DUAL_CHECK)
    return failures


def shrink_instance(inst: BipartiteInstance, u: int, v: int, still_fails) -> BipartiteInstance:
    """Greedily drop edges (never (u, v)) and then isolated vertices while the failure persists."""
    edges = list(inst.edges)
    for edge in list(edges):
        if edge == (u, v):
            continue
        trial = [e for e in edges if e != edge]
        candidate = BipartiteInstance(inst.dims, inst.offline, inst.online, trial, (u, v))
        if still_fails(candidate):
            edges = trial
    used_u = {e[0] for e in edges} | {u}
    used_v = {e[1] for e in edges} | {v}
    return BipartiteInstance(
        inst.dims,
        [x for x in inst.offline if x.id in used_v],
        [x for x in inst.online if x.id in used_u],
        edges,
        (u, v),
    )


def _suite_edges(name: str, checks: tuple, seed: int, instances: int) -> SuiteResult:
    result = SuiteResult(name, seed)
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        inst, u, v, grid = _random_edge_case(rng)
        failures = [f for f in _edge_failures(inst, u, v, grid) if f in checks]
        example = None
        if failures:
            def still_fails(candidate):
                return any(f in checks for f in _edge_failures(candidate, u, v, grid))
            shrunk = shrink_instance(inst, u, v, still_fails)
            example = {"instance": instance_to_dict(shrunk), "u": u, "v": v, "g": grid.to_rows()}
        for check in checks:
            result.record(check, check not in failures, example)
    return result


def suite_thresholds(seed: int = DEFAULT_SEED, instances: int = EDGE_SUITE_INSTANCES) -> SuiteResult:
    return _suite_edges("thresholds", (STRUCTURE_CHECK, MONOTONE_CHECK), seed, instances)


def suite_duals(seed: int = DEFAULT_SEED, instances: int = EDGE_SUITE_INSTANCES) -> SuiteResult:
    return _suite_edges("duals", (DUAL_CHECK,), seed, instances)


def suite_witness(seed: int = DEFAULT_SEED, max_n: int = WITNESS_SUITE_MAX_N) -> SuiteResult:
    result = SuiteResult("witness", seed)
    rng = np.random.default_rng(seed)
    for n in range(1, max_n + 1):
        dims = GridDims(n, n)
        grid = random_price_grid(dims, rng, strict=True)
        for pair in enumerate_pairs(dims):
            inst = build_witness(pair, grid)
            profile = extract_thresholds(inst, U_ID, inst.designated[1], grid)
            try:
                ok = profile.structure_valid and profile.to_pair() == pair
            except InvalidPathError:
                ok = False
            example = {"m": n, "n": n, "pair": str(pair), "g": grid.to_rows(),
                       "alpha": list(profile.alpha), "beta": list(profile.beta)}
            result.record(f"round trip on {dims}", ok, example)
    return result


SUITES = {
    "counts": suite_counts,
    "sandwich": suite_sandwich,
    "thresholds": suite_thresholds,
    "duals": suite_duals,
    "witness": suite_witness,
}

# names used on the command line
SUITE_ALIASES = {
    "lemma2": "thresholds",
    "lemma3": "duals",
}
SUITE_CHOICES = sorted(SUITES) + sorted(SUITE_ALIASES)


def run_suite(name: str, seed: int = DEFAULT_SEED, dump_dir=None, **kwargs) -> bool:
    name = SUITE_ALIASES.get(name, name)
    if name not in SUITES:
        raise ValueError(f"unknown suite '{name}', choose from {SUITE_CHOICES}")
    return SUITES[name](seed=seed, **kwargs).report(dump_dir)


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":

    print("🚀 Property Suites")
    print("=" * 50)

    ok = run_suite("counts") and run_suite("sandwich", trials=100) and run_suite("witness", max_n=3)
    exit(0 if ok else 1)
