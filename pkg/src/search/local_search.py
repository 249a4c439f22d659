"""
Local Search
============
Constraint generation over grid-path pairs (upper bound) or single paths
(lower-bound heuristic).

    gamma* = 1 + 1e-9
    solve LP(S)
    while Gamma(S) <= gamma* - eps:
        gamma* = Gamma(S); f_S = grid of the current solution
        for each member of S:
            value > Gamma(S) + removal_slack   -> remove it
            otherwise                          -> add every perturbation
                                                  with value < Gamma(S) - add_threshold
        solve LP(S)

All scores in one sweep use the f_S fixed at the top of the iteration.
Every upper Gamma(S) is a valid upper bound. The lower variant only
estimates the lower LP from above; its grid must be certified separately.
"""

import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import eval_lower_batch, eval_upper_batch
from gamma.price_grid import PriceGrid
from gridpaths.grid_paths import GridDims, neighbors, perturb_pairs
from lpcore.build_lower_lp import build_lower_lp_restricted
from lpcore.build_upper_lp import build_upper_lp
from lpcore.extract_price_grid import extract_price_grid
from lpcore.lp_model import ConstraintSet
from lpcore.solve_lp import solve
from persist.solution_files import load_checkpoint, save_checkpoint
from utils.config import (
    SEARCH_ADD_THRESHOLD,
    SEARCH_CONVERGENCE_EPSILON,
    SEARCH_INITIAL_BOUND,
    SEARCH_MAX_ITERATIONS,
    SEARCH_REMOVAL_SLACK,
)
from utils.errors import SearchError

ROUNDOFF = 1e-12


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class SearchOptions:
    convergence_epsilon: float = SEARCH_CONVERGENCE_EPSILON
    add_threshold: float = SEARCH_ADD_THRESHOLD
    removal_slack: float = SEARCH_REMOVAL_SLACK
    max_iterations: int = SEARCH_MAX_ITERATIONS
    iteration_time_budget: float = None   # seconds per LP solve
    backend: str = None
    checkpoint_path: str = None
    verbose: bool = True

    def __post_init__(self):
        for name in ("convergence_epsilon", "add_threshold", "removal_slack"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.add_threshold > self.removal_slack:
            raise ValueError("add_threshold must exceed removal_slack")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SearchReport:
    family: str
    dims: GridDims
    gamma: float                     # gamma*, the last accepted Gamma(S)
    grid: PriceGrid                  # f_S at gamma*
    constraint_set: ConstraintSet    # S at gamma*
    history: list = field(default_factory=list)
    converged: bool = True

    @property
    def iterations(self) -> int:
        return max(0, len(self.history) - 1)


class _Family:
    """Scoring, perturbation and LP construction for one constraint family."""

    def __init__(self, family: str):
        self.family = family

    def build(self, dims, S):
        if self.family == "upper":
            return build_upper_lp(dims, S, verbose=False)
        return build_lower_lp_restricted(dims, S, verbose=False)

    def score(self, grid, members) -> np.ndarray:
        if not members:
            return np.zeros(0)
        if self.family == "upper":
            a = np.array([p.a.b for p in members], dtype=np.int64)
            b = np.array([p.b.b for p in members], dtype=np.int64)
            return eval_upper_batch(grid, a, b)
        return eval_lower_batch(grid, np.array([p.b for p in members], dtype=np.int64))

    def perturb(self, member) -> list:
        return perturb_pairs(member) if self.family == "upper" else neighbors(member)


# =============================================================================
# SEARCH LOOP
# =============================================================================

def _solve_set(ops: _Family, dims, S, opts: SearchOptions, history):
    problem = ops.build(dims, S)
    sol = solve(problem, backend=opts.backend, time_limit=opts.iteration_time_budget, verbose=False)
    if not sol.is_optimal:
        raise SearchError(f"LP(S) solve ended '{sol.status}' with |S| = {len(S)}", history)
    return sol.objective, extract_price_grid(sol, dims)


def _sweep(ops: _Family, S: ConstraintSet, grid: PriceGrid, gamma_S: float, opts: SearchOptions):
    """One cleanup/extension pass over S against a fixed grid."""
    members = list(S)
    values = ops.score(grid, members)
    additions = removals = 0
    candidates = []
    for member, value in zip(members, values):
        if value > gamma_S + opts.removal_slack:
            S.discard(member)
            removals += 1
        else:
            candidates.extend(ops.perturb(member))

    candidate_values = ops.score(grid, candidates)
    for candidate, value in zip(candidates, candidate_values):
        if value < gamma_S - opts.add_threshold and S.add(candidate):
            additions += 1
    return additions, removals


def _run(family: str, dims: GridDims, S0: ConstraintSet, opts: SearchOptions,
         resume_from=None) -> SearchReport:
    ops = _Family(family)
    opts = opts or SearchOptions()

    if resume_from is not None:
        state = load_checkpoint(resume_from)
        S, gamma_star, history = state["constraint_set"], state["gamma_star"], state["history"]
        best_set, best_grid = state["accepted_set"], state["accepted_grid"]
        if S.family != family or S.dims != dims:
            raise SearchError(f"checkpoint holds a {S.family} set on {S.dims}", history)
        if opts.verbose:
            print(f"📥 Resuming {family} search at iteration {len(history) - 1}, |S| = {len(S):,}")
    else:
        if S0.family != family:
            raise SearchError(f"{family} search needs a {family} start set, got {S0.family}")
        if S0.dims != dims:
            raise SearchError(f"start set is on {S0.dims}, search is on {dims}")
        if len(S0) == 0:
            raise SearchError("start set is empty")
        S, gamma_star, history = S0.copy(), SEARCH_INITIAL_BOUND, []
        best_set = best_grid = None

    start = time.time()
    gamma_S, grid = _solve_set(ops, dims, S, opts, history)
    if not history:
        history.append(_record(0, gamma_S, len(S), time.time() - start, 0, 0))
        _report_iteration(opts, history[-1])

    if best_grid is None:
        best_set, best_grid = S.copy(), grid
    converged, accepted = True, False
    while _improves(gamma_S, gamma_star, opts.convergence_epsilon):
        iteration = len(history)
        if iteration > opts.max_iterations:
            converged = False
            gamma_star, best_set, best_grid = gamma_S, S.copy(), grid
            if opts.verbose:
                print(f"⚠️  Stopped at max_iterations = {opts.max_iterations}")
            break
        tick = time.time()
        gamma_star, accepted = gamma_S, True
        best_set, best_grid = S.copy(), grid

        additions, removals = _sweep(ops, S, grid, gamma_S, opts)
        if len(S) == 0:
            raise SearchError("constraint set emptied by cleanup", history)
        gamma_S, grid = _solve_set(ops, dims, S, opts, history)

        history.append(_record(iteration, gamma_S, len(S), time.time() - tick, additions, removals))
        _report_iteration(opts, history[-1])
        if opts.checkpoint_path:
            save_checkpoint(opts.checkpoint_path, S, gamma_star, history, grid, best_set, best_grid)

    if not accepted and resume_from is None:
        # the first solve is already above the initial bound
        gamma_star = gamma_S

    return SearchReport(family, dims, gamma_star, best_grid, best_set, history, converged)


def _improves(gamma_S: float, gamma_star: float, eps: float) -> bool:
    # round-off slack so that Gamma(S) = 1 passes the first test against 1 + 1e-9
    return gamma_S <= gamma_star - eps + ROUNDOFF


def _record(iteration, gamma, size, seconds, additions, removals) -> dict:
    return {"iteration": iteration, "gamma": gamma, "set_size": size,
            "seconds": seconds, "additions": additions, "removals": removals}


def _report_iteration(opts: SearchOptions, rec: dict):
    if opts.verbose:
        print(f"   iter {rec['iteration']:>4}: Gamma(S) = {rec['gamma']:.9f}  |S| = {rec['set_size']:>7,}  "
              f"+{rec['additions']:<6,} -{rec['removals']:<6,} ({rec['seconds']:.2f}s)")


def local_search_upper(dims: GridDims, S0: ConstraintSet, opts: SearchOptions = None,
                       resume_from=None) -> SearchReport:
    """Constraint generation over pairs; the returned gamma is a valid upper bound."""
    return _run("upper", dims, S0, opts, resume_from)


def local_search_lower(dims: GridDims, B0: ConstraintSet, opts: SearchOptions = None,
                       resume_from=None) -> SearchReport:
    """The same loop over single paths; gamma estimates the lower LP from above."""
    return _run("lower", dims, B0, opts, resume_from)
