"""Deterministic simulator of a BS -> relay -> cluster head -> D2D member coverage chain."""

from .channel import (
    ChannelModel,
    LinkMetrics,
    Rayleigh,
    Transmitter,
    apply_fading,
    capacity,
    energy_efficiency,
    noise_power,
    path_gain,
    sinr,
)
from .config import ScenarioConfig, load_config
from .errors import ClusterIsolatedError, ConfigError, DomainError, NoRelayCandidateError, ScenarioError
from .scenario import (
    DistanceRange,
    HopChain,
    HopSpec,
    Link,
    SweepResult,
    evaluate_link,
    run_baseline_chain,
    run_chain_sweep,
    run_hop_sweep,
)
from .selection import SelectionOutcome, SelectionWeights, link_quality, select_cluster_head, select_relay
from .topology import Node, PoissonClusterParams, Role, Topology, build_scenario_topology, distance, place_poisson_cluster

__version__ = "0.1.0"
