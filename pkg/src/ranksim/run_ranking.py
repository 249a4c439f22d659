"""
Run Ranking
===========
Vertex-weighted Ranking on a discretized instance.

Online vertices arrive by (stage, order key, id). Each one takes the free
neighbour with the largest w_v (1 - g(stage, rank)); ties go to the lower
rank, then the lower id. A vertex with any free neighbour always matches.

Duals of a matched edge: t_u = (1 - g) w_v, t_v = g w_v. Unmatched: 0.
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.price_grid import PriceGrid
from ranksim.instance import BipartiteInstance
from utils.errors import InvalidInstanceError


@dataclass
class DualOutcome:
    matching: dict                  # online id -> offline id
    t_online: dict                  # online id -> t_u
    t_offline: dict                 # offline id -> t_v
    arrival: list = field(default_factory=list)  # online ids in processing order

    @property
    def edges(self) -> set:
        return set(self.matching.items())

    def matched_by(self, v_id: int):
        """The online vertex that took v, or None."""
        return next((u for u, v in self.matching.items() if v == v_id), None)

    def total_weight(self) -> float:
        return sum(self.t_online.values()) + sum(self.t_offline.values())


def arrival_order(inst: BipartiteInstance) -> list:
    return [u.id for u in sorted(inst.online, key=lambda u: (u.stage, u.order_key, u.id))]


def run_ranking(inst: BipartiteInstance, grid: PriceGrid) -> DualOutcome:
    if inst.dims != grid.dims:
        raise InvalidInstanceError(f"instance is on {inst.dims}, price grid on {grid.dims}")
    g = grid.g
    offline = {v.id: v for v in inst.offline}
    stage = {u.id: u.stage for u in inst.online}

    taken = set()
    matching, t_online = {}, {u.id: 0.0 for u in inst.online}
    t_offline = {v.id: 0.0 for v in inst.offline}
    order = arrival_order(inst)

    for u in order:
        s = stage[u]
        best, best_key = None, None
        for v_id in inst.adjacency[u]:
            if v_id in taken:
                continue
            v = offline[v_id]
            key = (v.weight * (1.0 - g[s, v.rank]), -v.rank, -v.id)
            if best_key is None or key > best_key:
                best, best_key = v, key
        if best is None:
            continue
        price = g[s, best.rank]
        taken.add(best.id)
        matching[u] = best.id
        t_online[u] = (1.0 - price) * best.weight
        t_offline[best.id] = price * best.weight

    return DualOutcome(matching, t_online, t_offline, order)
