"""
Build Witness
=============
An unweighted instance whose edge (u, v) realizes a prescribed dominant pair
(a, b): with u at stage i, v is taken before u for ranks below b_i, u takes
v for ranks in [b_i, a_i), and v is left over from rank a_i on.

Gadget, per stage i:
    d_i  offline, rank a_i, adjacent to u           (u's fallback; only if a_i < n)
    c_i  online, stage i, adjacent to d_{i-1}        (retires the previous fallback)
    p_i  online, stage i, adjacent to v and to s_i   (takes v when its rank < b_i;
    s_i  offline, rank b_i                            skipped when b_i = 0, no s_i when b_i = n)

v has the largest offline id and u the largest order key, so both lose
every tie and u is the last arrival of its stage. At most 4m+2 vertices.
"""

import sys
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.price_grid import PriceGrid
from gridpaths.grid_paths import PathPair
from ranksim.instance import BipartiteInstance, OfflineVertex, OnlineVertex
from utils.errors import InfeasiblePriceGridError, InvalidPathError

U_ID = 0


def rank_collisions(grid: PriceGrid) -> list:
    """(stage, rank) cells with g(i, j) >= g(i, j+1), i < m, j < n."""
    m = grid.dims.m
    steps = np.diff(grid.g[:m, :], axis=1)
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(steps <= 0))]


def build_witness(pair: PathPair, grid: PriceGrid) -> BipartiteInstance:
    if pair.dims != grid.dims:
        raise InvalidPathError(f"pair is on {pair.dims}, price grid on {grid.dims}")
    collisions = rank_collisions(grid)
    if collisions:
        listed = ", ".join(f"g({i},{j}) >= g({i},{j + 1})" for i, j in collisions[:8])
        raise InfeasiblePriceGridError(
            f"price grid is flat in rank at {len(collisions)} cells ({listed}); "
            f"witness thresholds would depend on tie-breaking"
        )

    m, n = pair.dims.m, pair.dims.n
    a, b = pair.a.b, pair.b.b
    offline, online, edges = [], [], []
    fallback = {}

    def add_offline(rank):
        offline.append(OfflineVertex(len(offline), 1.0, rank))
        return offline[-1].id

    def add_online(stage):
        online.append(OnlineVertex(len(online) + 1, stage, float(len(online))))
        return online[-1].id

    for i in range(m):
        if a[i] < n:
            fallback[i] = add_offline(a[i])
    sinks = {i: add_offline(b[i]) for i in range(m) if 0 < b[i] < n}
    v_id = len(offline)
    offline.append(OfflineVertex(v_id, 1.0, 0))

    for i in range(m):
        if i - 1 in fallback:
            edges.append((add_online(i), fallback[i - 1]))
        if b[i] > 0:
            p_id = add_online(i)
            edges.append((p_id, v_id))
            if i in sinks:
                edges.append((p_id, sinks[i]))

    online.append(OnlineVertex(U_ID, 0, float(len(online))))
    edges.append((U_ID, v_id))
    edges.extend((U_ID, d) for d in fallback.values())

    return BipartiteInstance(pair.dims, offline, online, edges, designated=(U_ID, v_id))
