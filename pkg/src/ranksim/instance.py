"""
Bipartite Instance
==================
A discretized Ranking instance: offline vertices with weight and rank index,
online vertices with stage index and a within-stage order key, an edge list.

Order keys are distinct across all online vertices, so moving a vertex to
another stage never reorders the vertices already there.
"""

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

# Add src to path when run as a script
PROJECT_ROOT = Path(__file__).parent.parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gridpaths.grid_paths import GridDims
from utils.errors import InvalidInstanceError


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class OfflineVertex:
    id: int
    weight: float
    rank: int


@dataclass(frozen=True)
class OnlineVertex:
    id: int
    stage: int
    order_key: float


@dataclass(eq=False)
class BipartiteInstance:
    dims: GridDims
    offline: tuple
    online: tuple
    edges: tuple           # (online id, offline id)
    designated: tuple = None  # the (u, v) edge under study, when there is one
    _adjacency: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.offline = tuple(self.offline)
        self.online = tuple(self.online)
        self.edges = tuple((int(u), int(v)) for u, v in self.edges)
        m, n = self.dims.m, self.dims.n

        offline_ids = [v.id for v in self.offline]
        online_ids = [u.id for u in self.online]
        if len(set(offline_ids)) != len(offline_ids) or len(set(online_ids)) != len(online_ids):
            raise InvalidInstanceError("vertex ids repeat within a side")
        for v in self.offline:
            if not 0 <= v.rank < n:
                raise InvalidInstanceError(f"offline {v.id} has rank {v.rank} outside [0, {n})")
            if v.weight < 0:
                raise InvalidInstanceError(f"offline {v.id} has negative weight {v.weight}")
        for u in self.online:
            if not 0 <= u.stage < m:
                raise InvalidInstanceError(f"online {u.id} has stage {u.stage} outside [0, {m})")
        keys = [u.order_key for u in self.online]
        if len(set(keys)) != len(keys):
            raise InvalidInstanceError("online order keys must be distinct")

        known_u, known_v = set(online_ids), set(offline_ids)
        for u, v in self.edges:
            if u not in known_u or v not in known_v:
                raise InvalidInstanceError(f"edge ({u}, {v}) references a missing vertex")
        if len(set(self.edges)) != len(self.edges):
            raise InvalidInstanceError("edge list has duplicates")
        if self.designated is not None and tuple(self.designated) not in set(self.edges):
            raise InvalidInstanceError(f"designated edge {self.designated} is not an edge")

    @property
    def adjacency(self) -> dict:
        """online id -> offline ids, in edge-list order."""
        if self._adjacency is None:
            adj = {u.id: [] for u in self.online}
            for u, v in self.edges:
                adj[u].append(v)
            self._adjacency = adj
        return self._adjacency

    def offline_vertex(self, v_id: int) -> OfflineVertex:
        return next(v for v in self.offline if v.id == v_id)

    def online_vertex(self, u_id: int) -> OnlineVertex:
        return next(u for u in self.online if u.id == u_id)

    def with_overrides(self, u_id: int = None, stage: int = None,
                       v_id: int = None, rank: int = None) -> "BipartiteInstance":
        """Same instance with one online stage and/or one offline rank replaced."""
        online = self.online
        if u_id is not None:
            online = tuple(replace(u, stage=stage) if u.id == u_id else u for u in online)
        offline = self.offline
        if v_id is not None:
            offline = tuple(replace(v, rank=rank) if v.id == v_id else v for v in offline)
        return BipartiteInstance(self.dims, offline, online, self.edges, self.designated)

    def scaled(self, factor: float) -> "BipartiteInstance":
        offline = tuple(replace(v, weight=v.weight * factor) for v in self.offline)
        return BipartiteInstance(self.dims, offline, self.online, self.edges, self.designated)


# =============================================================================
# RANDOM INSTANCES
# =============================================================================

@dataclass(frozen=True)
class InstanceParams:
    dims: GridDims
    num_offline: int = 6
    num_online: int = 6
    edge_probability: float = 0.5
    weighted: bool = True
    max_weight: float = 2.0


def random_instance(params: InstanceParams, seed: int) -> BipartiteInstance:
    """Same (params, seed) always gives the same instance."""
    rng = np.random.default_rng(seed)
    m, n = params.dims.m, params.dims.n

    ranks = rng.integers(0, n, size=params.num_offline)
    if params.weighted:
        weights = rng.uniform(0.1, params.max_weight, size=params.num_offline)
    else:
        weights = np.ones(params.num_offline)
    offline = tuple(OfflineVertex(k, float(w), int(r)) for k, (w, r) in enumerate(zip(weights, ranks)))

    stages = rng.integers(0, m, size=params.num_online)
    keys = rng.permutation(params.num_online)
    online = tuple(OnlineVertex(k, int(s), float(o)) for k, (s, o) in enumerate(zip(stages, keys)))

    mask = rng.uniform(size=(params.num_online, params.num_offline)) < params.edge_probability
    edges = tuple((int(u), int(v)) for u, v in zip(*np.nonzero(mask)))
    return BipartiteInstance(params.dims, offline, online, edges)


# =============================================================================
# JSON
# =============================================================================

def instance_to_dict(inst: BipartiteInstance) -> dict:
    return {
        "m": inst.dims.m,
        "n": inst.dims.n,
        "offline": [{"id": v.id, "weight": v.weight, "rank": v.rank} for v in inst.offline],
        "online": [{"id": u.id, "stage": u.stage, "order_key": u.order_key} for u in inst.online],
        "edges": [list(e) for e in inst.edges],
        "designated": None if inst.designated is None else list(inst.designated),
    }


def instance_from_dict(data: dict) -> BipartiteInstance:
    return BipartiteInstance(
        dims=GridDims(data["m"], data["n"]),
        offline=tuple(OfflineVertex(int(v["id"]), float(v["weight"]), int(v["rank"])) for v in data["offline"]),
        online=tuple(OnlineVertex(int(u["id"]), int(u["stage"]), float(u["order_key"])) for u in data["online"]),
        edges=tuple(tuple(e) for e in data["edges"]),
        designated=None if data.get("designated") is None else tuple(data["designated"]),
    )
