"""
Grid Paths
==========
Monotone grid paths on the m x n grid: enumeration, inverse vectors,
single-square perturbations and grid refinement.

A path is stored as the vector b = (b_0, ..., b_m) with
0 <= b_0 <= ... <= b_m = n, where b_i / n is the path's height on stage i.
Serialized as "b0,b1,...,bm"; a pair as "a|b".
"""

import sys
from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations_with_replacement, islice
from math import comb
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from utils.config import CERTIFY_BLOCK_SIZE
from utils.errors import InvalidPathError


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True, order=True)
class GridDims:
    m: int  # stages
    n: int  # ranks

    def __post_init__(self):
        if int(self.m) < 1 or int(self.n) < 1:
            raise InvalidPathError(f"grid needs m >= 1 and n >= 1, got {self.m}x{self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    def doubled(self) -> "GridDims":
        return GridDims(2 * self.m, 2 * self.n)

    def __str__(self):
        return f"{self.m}x{self.n}"


@dataclass(frozen=True, order=True)
class MonotonePath:
    dims: GridDims
    b: tuple

    def __post_init__(self):
        b = tuple(int(x) for x in self.b)
        object.__setattr__(self, "b", b)
        m, n = self.dims.m, self.dims.n
        if len(b) != m + 1:
            raise InvalidPathError(f"path {b} has {len(b)} entries, expected m+1 = {m + 1}")
        if b[-1] != n:
            raise InvalidPathError(f"path {b} must end at n = {n}")
        if b[0] < 0:
            raise InvalidPathError(f"path {b} has a negative entry")
        if any(b[i] > b[i + 1] for i in range(m)):
            raise InvalidPathError(f"path {b} is not non-decreasing")

    def __str__(self):
        return ",".join(str(x) for x in self.b)


@dataclass(frozen=True)
class InversePath:
    dims: GridDims
    jb: tuple  # jb[j] = min{i : b_i > j}, j = 0..n-1


@dataclass(frozen=True, order=True)
class PathPair:
    a: MonotonePath
    b: MonotonePath

    def __post_init__(self):
        if self.a.dims != self.b.dims:
            raise InvalidPathError(f"pair mixes grids {self.a.dims} and {self.b.dims}")
        if any(x < y for x, y in zip(self.a.b, self.b.b)):
            raise InvalidPathError(f"pair {self} violates a_i >= b_i")

    @property
    def dims(self) -> GridDims:
        return self.a.dims

    def __str__(self):
        return f"{self.a}|{self.b}"


# =============================================================================
# COUNTING / ENUMERATION
# =============================================================================

def count_paths(dims: GridDims) -> int:
    """Number of monotone paths, C(m+n, m)."""
    return comb(dims.m + dims.n, dims.m)


def count_pairs(dims: GridDims) -> int:
    """Number of dominant pairs a >= b (two non-crossing lattice paths)."""
    m, n = dims.m, dims.n
    return comb(m + n, m) ** 2 - comb(m + n, m - 1) * comb(m + n, m + 1)


def enumerate_paths(dims: GridDims):
    """Yield every monotone path once, lexicographic in b."""
    n = dims.n
    for head in combinations_with_replacement(range(n + 1), dims.m):
        yield MonotonePath(dims, head + (n,))


def path_blocks(dims: GridDims, block_size: int):
    """Yield the lexicographic path stream as int arrays of shape (k, m+1)."""
    m, n = dims.m, dims.n
    stream = combinations_with_replacement(range(n + 1), m)
    while True:
        chunk = list(islice(stream, block_size))
        if not chunk:
            return
        block = np.empty((len(chunk), m + 1), dtype=np.int64)
        block[:, :m] = np.asarray(chunk, dtype=np.int64).reshape(len(chunk), m)
        block[:, m] = n
        yield block


def all_path_array(dims: GridDims, block_size: int = CERTIFY_BLOCK_SIZE) -> np.ndarray:
    """Every path as one (count_paths, m+1) int array, lexicographic."""
    return np.concatenate(list(path_blocks(dims, block_size)), axis=0)


def paths_above(lower: MonotonePath):
    """Yield every path a with a_i >= lower_i, lexicographic in a."""
    dims = lower.dims
    m, n = dims.m, dims.n
    floor = lower.b
    prefix = []

    def extend(lo, i):
        if i == m:
            yield MonotonePath(dims, tuple(prefix) + (n,))
            return
        for v in range(max(lo, floor[i]), n + 1):
            prefix.append(v)
            yield from extend(v, i + 1)
            prefix.pop()

    yield from extend(0, 0)


def enumerate_pairs(dims: GridDims):
    """Yield every dominant pair, ordered by b then a."""
    for b in enumerate_paths(dims):
        for a in paths_above(b):
            yield PathPair(a, b)


# Combinatorial number system over non-decreasing sequences

def _tail_count(n: int, v: int, rest: int) -> int:
    # sequences of length `rest` with values in [v, n]
    return comb(n - v + rest, rest)


def path_at(dims: GridDims, index: int) -> MonotonePath:
    """Path number `index` of the lexicographic stream."""
    m, n = dims.m, dims.n
    total = count_paths(dims)
    if not 0 <= index < total:
        raise IndexError(f"path index {index} outside [0, {total})")
    b = []
    lo = 0
    for i in range(m):
        rest = m - i - 1
        v = lo
        while index >= _tail_count(n, v, rest):
            index -= _tail_count(n, v, rest)
            v += 1
        b.append(v)
        lo = v
    return MonotonePath(dims, tuple(b) + (n,))


def path_index(path: MonotonePath) -> int:
    """Position of `path` in the lexicographic stream."""
    m, n = path.dims.m, path.dims.n
    index = 0
    lo = 0
    for i in range(m):
        rest = m - i - 1
        for v in range(lo, path.b[i]):
            index += _tail_count(n, v, rest)
        lo = path.b[i]
    return index


# =============================================================================
# INVERSE VECTORS
# =============================================================================

def inverse_vector(b, n: int) -> tuple:
    """b^-_j = min{i : b_i > j} for j = 0..n-1 (b non-decreasing, b_m = n)."""
    return tuple(bisect_right(b, j) for j in range(n))


def inverse(path: MonotonePath) -> InversePath:
    return InversePath(path.dims, inverse_vector(path.b, path.dims.n))


def path_from_inverse(inv: InversePath) -> MonotonePath:
    """Rebuild b via b_i = min{j : jb_j > i}, or n when no such j."""
    m, n = inv.dims.m, inv.dims.n
    b = tuple(bisect_right(inv.jb, i) for i in range(m)) + (n,)
    return MonotonePath(inv.dims, b)


def inverse_block(block: np.ndarray, n: int) -> np.ndarray:
    """Row-wise inverse vectors of a (k, m+1) block; shape (k, n)."""
    ranks = np.arange(n)
    return (block[:, :, None] <= ranks[None, None, :]).sum(axis=1)


# =============================================================================
# LOCAL PERTURBATIONS
# =============================================================================

def neighbors(path: MonotonePath) -> list:
    """
    Paths that differ from `path` by one unit square.

    Moving b_i (i < m) by +-1 changes the area under the step path by exactly
    one grid cell, so the single-square neighbourhood is the set of valid
    single-coordinate moves. Returned in lexicographic order.
    """
    m, n = path.dims.m, path.dims.n
    b = path.b
    result = []
    for i in range(m):
        lo = b[i - 1] if i > 0 else 0
        hi = b[i + 1]
        for step in (-1, 1):
            v = b[i] + step
            if lo <= v <= hi:
                result.append(MonotonePath(path.dims, b[:i] + (v,) + b[i + 1:]))
    return sorted(result)


def perturb_pairs(pair: PathPair) -> list:
    """T(a, b): move one side by one square, keep only dominant pairs."""
    a, b = pair.a, pair.b
    result = set()
    for a2 in neighbors(a):
        if all(x >= y for x, y in zip(a2.b, b.b)):
            result.add(PathPair(a2, b))
    for b2 in neighbors(b):
        if all(x >= y for x, y in zip(a.b, b2.b)):
            result.add(PathPair(a, b2))
    return sorted(result)


# =============================================================================
# GRID REFINEMENT
# =============================================================================

def upscale(path: MonotonePath) -> MonotonePath:
    """Same step function on the (2m, 2n) grid."""
    m, n = path.dims.m, path.dims.n
    b = tuple(2 * path.b[i // 2] for i in range(2 * m)) + (2 * n,)
    return MonotonePath(path.dims.doubled(), b)


def project_path(path: MonotonePath, dims: GridDims) -> MonotonePath:
    """
    Nearest-grid-below projection onto an arbitrary grid.

    Monotone in the input, so dominance survives; equals upscale() when
    dims is the doubled grid.
    """
    m, n = path.dims.m, path.dims.n
    m2, n2 = dims.m, dims.n
    b = tuple((path.b[(i * m) // m2] * n2) // n for i in range(m2)) + (n2,)
    return MonotonePath(dims, b)


def step_value(path: MonotonePath, x: float) -> float:
    """theta(x) = b_{floor(m x)} / n."""
    m, n = path.dims.m, path.dims.n
    i = min(int(np.floor(m * x)), m)
    return path.b[i] / n


# =============================================================================
# SERIALIZATION
# =============================================================================

def parse_path(text: str) -> MonotonePath:
    """Parse "b0,...,bm"; the grid is (len-1, last entry)."""
    b = tuple(int(x) for x in text.strip().split(","))
    if len(b) < 2:
        raise InvalidPathError(f"path '{text}' needs at least two entries")
    return MonotonePath(GridDims(len(b) - 1, b[-1]), b)


def parse_pair(text: str) -> PathPair:
    left, right = text.strip().split("|")
    return PathPair(parse_path(left), parse_path(right))


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    print("🚀 Grid path counts")
    print("=" * 50)
    for d in [GridDims(2, 2), GridDims(5, 5), GridDims(11, 12), GridDims(20, 20)]:
        print(f"   {str(d):>6}: {count_paths(d):>25,} paths   {count_pairs(d):>45,} pairs")

    sample = MonotonePath(GridDims(3, 4), (0, 2, 3, 4))
    print(f"\n📄 b = {sample}")
    print(f"   inverse   : {inverse(sample).jb}")
    print(f"   neighbors : {[str(p) for p in neighbors(sample)]}")
    print(f"   upscale   : {upscale(sample)}")
