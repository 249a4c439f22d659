"""
Extract Thresholds
==================
Replay Ranking for every (stage of u, rank of v) cell and read off the
threshold structure of the edge (u, v).

Outcome at u's arrival, per cell:
    A  v was already matched
    B  u takes v
    C  v is still free after u

For each stage the outcomes along the ranks must read A...AB...BC...C.
beta_i is the first non-A rank, alpha_i the first C rank (n when none).
"""

import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import GammaBreakdown, gamma_exact_vectors
from gamma.price_grid import PriceGrid
from gridpaths.grid_paths import GridDims, MonotonePath, PathPair
from ranksim.instance import BipartiteInstance
from ranksim.run_ranking import DualOutcome, run_ranking
from utils.errors import InvalidInstanceError

PREMATCHED, MATCHED, LEFT_OVER = "A", "B", "C"
_THREE_INTERVALS = re.compile(r"^A*B*C*$")


@dataclass(frozen=True)
class ThresholdProfile:
    dims: GridDims
    alpha: tuple
    beta: tuple
    structure_valid: bool

    @property
    def beta_monotone(self) -> bool:
        return all(x <= y for x, y in zip(self.beta, self.beta[1:]))

    @property
    def alpha_monotone(self) -> bool:
        return all(x <= y for x, y in zip(self.alpha, self.alpha[1:]))

    def beta_path(self) -> MonotonePath:
        return MonotonePath(self.dims, tuple(self.beta) + (self.dims.n,))

    def to_pair(self) -> PathPair:
        """Only for monotone alpha (always the case on unweighted graphs)."""
        return PathPair(MonotonePath(self.dims, tuple(self.alpha) + (self.dims.n,)), self.beta_path())

    def gamma(self, grid: PriceGrid) -> GammaBreakdown:
        return gamma_exact_vectors(grid, self.alpha, self.beta_path())


def _check_edge(inst: BipartiteInstance, u_id: int, v_id: int, grid: PriceGrid):
    if inst.dims != grid.dims:
        raise InvalidInstanceError(f"instance is on {inst.dims}, price grid on {grid.dims}")
    if (u_id, v_id) not in set(inst.edges):
        raise InvalidInstanceError(f"({u_id}, {v_id}) is not an edge")


def replay(inst: BipartiteInstance, u_id: int, v_id: int, grid: PriceGrid,
           stage: int, rank: int):
    """Run with u moved to `stage` and v moved to `rank`; returns (outcome, DualOutcome)."""
    result = run_ranking(inst.with_overrides(u_id, stage, v_id, rank), grid)
    taker = result.matched_by(v_id)
    if taker == u_id:
        return MATCHED, result
    if taker is not None and result.arrival.index(taker) < result.arrival.index(u_id):
        return PREMATCHED, result
    return LEFT_OVER, result


def classify_outcomes(inst: BipartiteInstance, u_id: int, v_id: int, grid: PriceGrid) -> np.ndarray:
    """(m, n) array of 'A' / 'B' / 'C', row = stage of u, column = rank of v."""
    _check_edge(inst, u_id, v_id, grid)
    m, n = inst.dims.m, inst.dims.n
    table = np.empty((m, n), dtype="<U1")
    for i in range(m):
        for j in range(n):
            table[i, j] = replay(inst, u_id, v_id, grid, i, j)[0]
    return table


def extract_thresholds(inst: BipartiteInstance, u_id: int, v_id: int, grid: PriceGrid) -> ThresholdProfile:
    table = classify_outcomes(inst, u_id, v_id, grid)
    n = inst.dims.n
    alpha, beta, valid = [], [], True
    for row in table:
        word = "".join(row)
        valid = valid and bool(_THREE_INTERVALS.match(word))
        beta.append(next((j for j, c in enumerate(word) if c != PREMATCHED), n))
        alpha.append(next((j for j, c in enumerate(word) if c == LEFT_OVER), n))
    return ThresholdProfile(inst.dims, tuple(alpha), tuple(beta), valid)


def expected_duals(inst: BipartiteInstance, u_id: int, v_id: int, grid: PriceGrid) -> float:
    """Exact mean of t_u + t_v over all m*n equally likely (stage, rank) cells."""
    _check_edge(inst, u_id, v_id, grid)
    m, n = inst.dims.m, inst.dims.n
    total = 0.0
    for i in range(m):
        for j in range(n):
            result: DualOutcome = replay(inst, u_id, v_id, grid, i, j)[1]
            total += result.t_online[u_id] + result.t_offline[v_id]
    return total / (m * n)
