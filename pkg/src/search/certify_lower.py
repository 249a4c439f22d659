"""
Certify Lower
=============
min over every path b of L(g, b), by full enumeration. Whatever produced g,
this minimum is a sound lower bound on the competitive ratio.
"""

import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.evaluate_gamma import eval_lower_batch
from gamma.price_grid import PriceGrid
from gridpaths.grid_paths import MonotonePath, count_paths, path_blocks
from utils.config import CERTIFY_BLOCK_SIZE, CERTIFY_PATH_BUDGET
from utils.errors import CertificationBudgetError


@dataclass(frozen=True)
class Certificate:
    value: float
    worst_path: MonotonePath
    checked: int
    seconds: float


def certify_lower_report(grid: PriceGrid, budget: int = None,
                         block_size: int = CERTIFY_BLOCK_SIZE) -> Certificate:
    budget = CERTIFY_PATH_BUDGET if budget is None else budget
    dims = grid.dims
    total = count_paths(dims)
    start = time.time()

    best, worst_path, checked = np.inf, None, 0
    for block in path_blocks(dims, block_size):
        if checked + len(block) > budget:
            block = block[: budget - checked]
        if len(block):
            values = eval_lower_batch(grid, block)
            k = int(np.argmin(values))
            if values[k] < best:
                best, worst_path = float(values[k]), MonotonePath(dims, tuple(block[k]))
            checked += len(block)
        if checked >= budget and checked < total:
            raise CertificationBudgetError(best, checked, total)

    return Certificate(best, worst_path, checked, time.time() - start)


def certify_lower(grid: PriceGrid, budget: int = None) -> float:
    return certify_lower_report(grid, budget).value
