"""Nodes, geometry and Poisson-cluster placement of disaster-area devices."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NoRelayCandidateError

Point = tuple[float, float]
ClusterLayout = list[tuple[Point, list[Point]]]

EDGE_BAND = (0.9, 1.0)


class Role(str, Enum):
    BASE_STATION = "base_station"
    RELAY = "relay"
    CLUSTER_HEAD = "cluster_head"
    CLUSTER_MEMBER = "cluster_member"


# Reference transmit powers; members transmit D2D at cluster-head power.
DEFAULT_POWERS_W = {
    Role.BASE_STATION: 5.0,
    Role.RELAY: 2.5,
    Role.CLUSTER_HEAD: 1.5,
    Role.CLUSTER_MEMBER: 1.5,
}

DEFAULT_ENERGY_J = {
    Role.BASE_STATION: math.inf,  # mains powered
    Role.RELAY: 100.0,
    Role.CLUSTER_HEAD: 50.0,
    Role.CLUSTER_MEMBER: 50.0,
}


@dataclass(frozen=True)
class Node:
    id: int
    role: Role
    x: float
    y: float
    tx_power_w: float
    residual_energy_j: float

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"node id must be >= 0, got {self.id}")
        if not self.tx_power_w >= 0:
            raise ValueError(f"node {self.id}: tx_power_w must be >= 0")
        if not self.residual_energy_j >= 0:
            raise ValueError(f"node {self.id}: residual_energy_j must be >= 0")

    @property
    def position(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True)
class PoissonClusterParams:
    """Matérn cluster process: Poisson parents, Poisson(μ) members uniform in a disc."""

    parent_intensity: float = 1e-4  # clusters per m^2
    mean_cluster_size: float = 8.0
    cluster_radius: float = 30.0
    region: tuple[float, float, float, float] = (1000.0, -150.0, 1300.0, 150.0)

    def __post_init__(self):
        if not self.parent_intensity >= 0:
            raise ValueError("parent_intensity ≥ 0")
        if not self.mean_cluster_size >= 0:
            raise ValueError("mean_cluster_size ≥ 0")
        if not self.cluster_radius >= 0:
            raise ValueError("cluster_radius ≥ 0")
        x0, y0, x1, y1 = self.region
        if not (x1 > x0 and y1 > y0):
            raise ValueError("region must satisfy x_max > x_min and y_max > y_min")

    @property
    def area(self) -> float:
        x0, y0, x1, y1 = self.region
        return (x1 - x0) * (y1 - y0)


@dataclass(frozen=True)
class Topology:
    nodes: tuple[Node, ...]
    coverage_radius_m: float
    # node ids of each cluster, parent first
    clusters: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if not self.coverage_radius_m > 0:
            raise ValueError("coverage_radius_m > 0")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        n_bs = sum(1 for n in self.nodes if n.role is Role.BASE_STATION)
        if n_bs != 1:
            raise ValueError(f"topology needs exactly one base station, found {n_bs}")

    def node(self, node_id: int) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def base_station(self) -> Node:
        return next(n for n in self.nodes if n.role is Role.BASE_STATION)

    def by_role(self, role: Role) -> list[Node]:
        return [n for n in self.nodes if n.role is role]

    def cluster_nodes(self, index: int) -> list[Node]:
        return [self.node(i) for i in self.clusters[index]]

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "role": n.role.value,
                    "x_m": n.x,
                    "y_m": n.y,
                    "tx_power_w": n.tx_power_w,
                    # JSON has no infinity; null marks an unlimited (mains) supply
                    "residual_energy_j": None if math.isinf(n.residual_energy_j) else n.residual_energy_j,
                }
                for n in self.nodes
            ],
            "coverage_radius_m": self.coverage_radius_m,
            "clusters": [list(c) for c in self.clusters],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def distance(a: Node, b: Node) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def point_distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def place_poisson_cluster(params: PoissonClusterParams, seed: int) -> ClusterLayout:
    """Draw one Matérn cluster realisation inside ``params.region``.

    Members that land outside the region are clamped onto its boundary so
    that member counts stay Poisson(μ).
    """
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = params.region
    n_parents = int(rng.poisson(params.parent_intensity * params.area))
    px = rng.uniform(x0, x1, n_parents)
    py = rng.uniform(y0, y1, n_parents)
    counts = rng.poisson(params.mean_cluster_size, n_parents)
    total = int(counts.sum())
    r = params.cluster_radius * np.sqrt(rng.uniform(0.0, 1.0, total))
    theta = rng.uniform(0.0, 2.0 * math.pi, total)
    owner = np.repeat(np.arange(n_parents), counts)
    mx = np.clip(px[owner] + r * np.cos(theta), x0, x1).tolist()
    my = np.clip(py[owner] + r * np.sin(theta), y0, y1).tolist()

    layout: ClusterLayout = []
    start = 0
    for i, n in enumerate(counts.tolist()):
        members = list(zip(mx[start:start + n], my[start:start + n]))
        layout.append(((float(px[i]), float(py[i])), members))
        start += n
    return layout


def place_edge_devices(
    count: int,
    bs_position: Point,
    coverage_radius_m: float,
    sector_deg: tuple[float, float] = (-180.0, 180.0),
    seed: int = 0,
) -> list[Point]:
    """Scatter ``count`` devices uniformly over the edge band of the BS coverage disc,
    restricted to the angular sector ``sector_deg`` (degrees from the +x axis)."""
    rng = np.random.default_rng([seed, 1])
    lo, hi = EDGE_BAND
    r = coverage_radius_m * np.sqrt(rng.uniform(lo**2, hi**2, count))
    theta = np.radians(rng.uniform(sector_deg[0], sector_deg[1], count))
    bx, by = bs_position
    return [(float(bx + a * math.cos(t)), float(by + a * math.sin(t))) for a, t in zip(r, theta)]


def in_edge_band(position: Point, bs_position: Point, coverage_radius_m: float) -> bool:
    d = point_distance(position, bs_position)
    lo, hi = EDGE_BAND
    return lo * coverage_radius_m <= d <= hi * coverage_radius_m


def build_scenario_topology(
    cluster_layout: ClusterLayout,
    bs_position: Point,
    coverage_radius_m: float,
    powers: Mapping[Role, float] | None = None,
    initial_energy_j: Mapping[Role, float] | None = None,
    edge_devices: Iterable[Point] = (),
) -> Topology:
    """Assemble BS, relay candidates and clusters into a :class:`Topology`.

    Relay candidates are the ``edge_devices`` lying in the edge band
    [0.9, 1.0] x coverage radius around the BS; devices outside the band are
    not part of the scenario. Each cluster parent becomes a cluster head
    candidate and its disc members become cluster members. Ids are dense
    from 0 in the order BS, relays, then cluster by cluster (parent first).
    """
    if not coverage_radius_m > 0:
        raise ValueError("coverage_radius_m > 0")
    powers = {**DEFAULT_POWERS_W, **(powers or {})}
    energy = {**DEFAULT_ENERGY_J, **(initial_energy_j or {})}

    nodes: list[Node] = []

    def add(role: Role, pos: Point) -> int:
        nid = len(nodes)
        nodes.append(Node(nid, role, float(pos[0]), float(pos[1]), powers[role], energy[role]))
        return nid

    add(Role.BASE_STATION, bs_position)
    relays = [p for p in edge_devices if in_edge_band(p, bs_position, coverage_radius_m)]
    if not relays:
        raise NoRelayCandidateError()
    for p in relays:
        add(Role.RELAY, p)

    clusters = []
    for parent, members in cluster_layout:
        ids = [add(Role.CLUSTER_HEAD, parent)]
        ids.extend(add(Role.CLUSTER_MEMBER, m) for m in members)
        clusters.append(tuple(ids))

    return Topology(tuple(nodes), float(coverage_radius_m), tuple(clusters))


def topology_from_dict(data: dict) -> Topology:
    nodes = tuple(
        Node(
            id=int(n["id"]),
            role=Role(n["role"]),
            x=float(n["x_m"]),
            y=float(n["y_m"]),
            tx_power_w=float(n["tx_power_w"]),
            residual_energy_j=math.inf if n["residual_energy_j"] is None else float(n["residual_energy_j"]),
        )
        for n in data["nodes"]
    )
    clusters: Sequence = data.get("clusters", [])
    return Topology(nodes, float(data["coverage_radius_m"]), tuple(tuple(c) for c in clusters))
