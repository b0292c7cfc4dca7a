"""Three-hop chain assembly and the distance / path-loss-exponent sweeps.

hop 1 is BS -> relay, hop 2 relay -> cluster head, hop 3 cluster head ->
cluster member (D2D). A chain delivers the minimum of its per-hop capacities
(decode-and-forward bottleneck).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import (
    ChannelModel,
    LinkMetrics,
    Transmitter,
    apply_fading,
    capacity,
    energy_efficiency,
    noise_power,
    path_gain,
    sinr,
)
from .errors import ClusterIsolatedError, DomainError
from .selection import (
    DEFAULT_SNR_REF,
    SelectionOutcome,
    SelectionWeights,
    select_cluster_head,
    select_relay,
)
from .topology import DEFAULT_POWERS_W, Role, Topology, distance

BANDWIDTH_HZ = 10e6
HOP_COUNT = 3
ALPHAS = (2.0, 2.5, 3.0)

# Reference distance ranges; the step counts give 100 m, 5 m and 5 m spacing.
DEFAULT_RANGES = {
    1: (100.0, 1000.0, 10),
    2: (5.0, 250.0, 50),
    3: (5.0, 50.0, 10),
}
DEFAULT_HOP_POWERS = {
    1: DEFAULT_POWERS_W[Role.BASE_STATION],
    2: DEFAULT_POWERS_W[Role.RELAY],
    3: DEFAULT_POWERS_W[Role.CLUSTER_HEAD],
}
DEFAULT_INTERFERERS = {1: 0, 2: 0, 3: 2}
INTERFERER_DISTANCE_FACTOR = 2.0


@dataclass(frozen=True)
class DistanceRange:
    min_m: float
    max_m: float
    steps: int

    def __post_init__(self):
        if not 0 < self.min_m <= self.max_m:
            raise ValueError(f"distance range needs 0 < min <= max, got {self.min_m}..{self.max_m}")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")

    def points(self) -> list[float]:
        if self.steps == 1:
            return [float(self.min_m)]
        return [float(d) for d in np.linspace(self.min_m, self.max_m, self.steps)]


@dataclass(frozen=True)
class HopSpec:
    hop_index: int
    tx_power_w: float
    distance_range: DistanceRange
    interferer_count: int = 0
    interferer_distance_factor: float = INTERFERER_DISTANCE_FACTOR

    def __post_init__(self):
        if self.hop_index not in (1, 2, 3):
            raise ValueError(f"hop_index must be 1, 2 or 3, got {self.hop_index}")
        if self.interferer_count < 0:
            raise ValueError("interferer_count must be >= 0")

    @classmethod
    def default(cls, hop_index: int) -> HopSpec:
        return cls(
            hop_index,
            DEFAULT_HOP_POWERS[hop_index],
            DistanceRange(*DEFAULT_RANGES[hop_index]),
            DEFAULT_INTERFERERS[hop_index],
        )


@dataclass(frozen=True)
class Link:
    """One hop of a chain. Co-channel interferers transmit at the link's own
    power from ``interferer_distance_factor`` times the link distance."""

    tx_power_w: float
    distance_m: float
    interferer_count: int = 0
    interferer_distance_factor: float = INTERFERER_DISTANCE_FACTOR

    def interferers(self) -> list[tuple[float, float]]:
        d = self.interferer_distance_factor * self.distance_m
        return [(self.tx_power_w, d)] * self.interferer_count


@dataclass(frozen=True)
class HopChain:
    links: tuple[Link, ...]

    def __post_init__(self):
        if not self.links:
            raise ValueError("a chain needs at least one link")

    @property
    def hop_count(self) -> int:
        return len(self.links)

    @property
    def max_tx_power_w(self) -> float:
        return max(link.tx_power_w for link in self.links)


@dataclass(frozen=True)
class SweepRow:
    hop: int | str
    distance_m: float
    alpha: float
    bandwidth_hz: float
    tx_power_w: float
    sinr_linear: float
    capacity_bps: float
    ee_bits_per_joule: float


def _row_key(row: SweepRow):
    hop = row.hop if isinstance(row.hop, int) else 4
    return (hop, row.alpha, row.distance_m)


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def __post_init__(self):
        self.rows.sort(key=_row_key)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def evaluate_link(
    model: ChannelModel,
    tx_power_w: float,
    distance_m: float,
    bandwidth_hz: float,
    interferers: Sequence[tuple[float, float]] = (),
    hop_count: int = 1,
    rng: np.random.Generator | None = None,
) -> LinkMetrics:
    """SINR, capacity and energy efficiency of one link.

    ``interferers`` holds ``(power_w, distance_m)`` pairs; each interferer's gain
    comes from its own distance to the receiver. Under Rayleigh fading the
    capacity is the mean over ``model.fading.trials`` realisations and the
    stored SINR is the equivalent 2^(C/B) - 1.
    """
    gain = path_gain(model, distance_m)
    noise = noise_power(model, bandwidth_hz)
    others = [(p, path_gain(model, d)) for p, d in interferers]

    if model.fading is None:
        s = sinr(Transmitter(tx_power_w, gain), [Transmitter(p, g) for p, g in others], noise)
        c = capacity(bandwidth_hz, [s])
    else:
        if rng is None:
            raise DomainError("a random generator is required when fading is enabled")
        trials = model.fading.trials
        # faded gains are capped at 1: a passive channel cannot amplify
        sig = np.minimum(apply_fading(gain, model.fading, rng, trials), 1.0)
        interference = np.zeros(trials)
        for p, g in others:
            interference += p * np.minimum(apply_fading(g, model.fading, rng, trials), 1.0)
        inst = tx_power_w * sig / (interference + noise)
        c = float(np.mean(bandwidth_hz * np.log2(1.0 + inst)))
        s = 2.0 ** (c / bandwidth_hz) - 1.0

    ee = energy_efficiency(c, hop_count, tx_power_w) if tx_power_w > 0 else 0.0
    return LinkMetrics(gain=gain, sinr=s, capacity_bps=c, ee_bits_per_joule=ee)


def run_hop_sweep(
    hop: HopSpec,
    models: Sequence[ChannelModel],
    bandwidth_hz: float = BANDWIDTH_HZ,
    hop_count_for_ee: int = HOP_COUNT,
    rng: np.random.Generator | None = None,
) -> SweepResult:
    """Evaluate one hop over its distance range for every channel model.

    EE is charged against ``hop_count_for_ee`` hops even though a single hop
    is plotted.
    """
    alphas = [m.path_loss_exponent for m in models]
    if len(set(alphas)) != len(alphas):
        raise ValueError("channel models must have distinct path loss exponents")
    rows = []
    for model in models:
        for d in hop.distance_range.points():
            link = Link(hop.tx_power_w, d, hop.interferer_count, hop.interferer_distance_factor)
            m = evaluate_link(model, link.tx_power_w, d, bandwidth_hz, link.interferers(), hop_count_for_ee, rng)
            rows.append(
                SweepRow(hop.hop_index, d, model.path_loss_exponent, bandwidth_hz, hop.tx_power_w,
                         m.sinr, m.capacity_bps, m.ee_bits_per_joule)
            )
    return SweepResult(rows)


def chain_metrics(
    chain: HopChain,
    model: ChannelModel,
    bandwidth_hz: float,
    rng: np.random.Generator | None = None,
) -> tuple[LinkMetrics, list[LinkMetrics]]:
    """End-to-end metrics of ``chain`` plus the per-link metrics.

    The chain capacity is the bottleneck link's; EE divides it by H times the
    largest transmit power in the chain. The returned gain and SINR are the
    bottleneck link's.
    """
    per_link = [
        evaluate_link(model, link.tx_power_w, link.distance_m, bandwidth_hz, link.interferers(), 1, rng)
        for link in chain.links
    ]
    worst = min(per_link, key=lambda m: m.capacity_bps)
    ee = energy_efficiency(worst.capacity_bps, chain.hop_count, chain.max_tx_power_w)
    return LinkMetrics(worst.gain, worst.sinr, worst.capacity_bps, ee), per_link


def run_chain_sweep(
    chain_template: HopChain,
    d2d_distance_range: DistanceRange,
    model: ChannelModel,
    bandwidth_hz: float = BANDWIDTH_HZ,
    rng: np.random.Generator | None = None,
) -> SweepResult:
    """Sweep the distance of the chain's last (D2D) link, others held fixed."""
    rows = []
    last = chain_template.links[-1]
    for d in d2d_distance_range.points():
        links = chain_template.links[:-1] + (
            Link(last.tx_power_w, d, last.interferer_count, last.interferer_distance_factor),
        )
        chain = HopChain(links)
        m, _ = chain_metrics(chain, model, bandwidth_hz, rng)
        rows.append(
            SweepRow("chain", d, model.path_loss_exponent, bandwidth_hz, chain.max_tx_power_w,
                     m.sinr, m.capacity_bps, m.ee_bits_per_joule)
        )
    return SweepResult(rows)


@dataclass(frozen=True)
class ChainSettings:
    """Election parameters and the D2D hop template used to build a chain."""

    weights: SelectionWeights = SelectionWeights()
    snr_ref: float = DEFAULT_SNR_REF
    ch_energy_threshold_j: float = 10.0
    d2d_power_w: float = DEFAULT_HOP_POWERS[3]
    d2d_interferers: int = DEFAULT_INTERFERERS[3]
    interferer_distance_factor: float = INTERFERER_DISTANCE_FACTOR


@dataclass(frozen=True)
class ChainSelection:
    relay: SelectionOutcome
    relay_id: int
    cluster: int
    cluster_head: int


def elect(
    topology: Topology,
    model: ChannelModel,
    bandwidth_hz: float,
    settings: ChainSettings = ChainSettings(),
    baseline: bool = False,
) -> ChainSelection:
    """Pick the relay and the cluster head of the served cluster.

    The proposed scheme takes the best-scoring relay; the baseline takes the
    worst-scoring one. The served cluster is the closest-to-BS cluster that
    has an eligible head.
    """
    bs = topology.base_station
    outcome = select_relay(topology.by_role(Role.RELAY), bs, model, bandwidth_hz, settings.weights, settings.snr_ref)
    relay = topology.node(outcome.worst if baseline else outcome.chosen)

    order = sorted(
        range(len(topology.clusters)),
        key=lambda i: (distance(bs, topology.node(topology.clusters[i][0])), i),
    )
    for i in order:
        try:
            head = select_cluster_head(
                topology.cluster_nodes(i), relay, model, bandwidth_hz,
                settings.ch_energy_threshold_j, settings.snr_ref,
            )
        except ClusterIsolatedError:
            continue
        return ChainSelection(outcome, relay.id, i, head.chosen)
    raise ClusterIsolatedError("no cluster with an eligible cluster head")


def assemble_chain(
    topology: Topology,
    model: ChannelModel,
    bandwidth_hz: float,
    d2d_distance_m: float,
    settings: ChainSettings = ChainSettings(),
    baseline: bool = False,
) -> tuple[HopChain, ChainSelection]:
    """BS -> relay -> cluster head -> member chain for one topology."""
    sel = elect(topology, model, bandwidth_hz, settings, baseline)
    bs = topology.base_station
    relay = topology.node(sel.relay_id)
    head = topology.node(sel.cluster_head)
    chain = HopChain((
        Link(bs.tx_power_w, distance(bs, relay)),
        Link(relay.tx_power_w, distance(relay, head)),
        Link(settings.d2d_power_w, d2d_distance_m, settings.d2d_interferers, settings.interferer_distance_factor),
    ))
    return chain, sel


def run_proposed_chain(
    topology: Topology,
    d2d_distance_range: DistanceRange,
    model: ChannelModel,
    bandwidth_hz: float = BANDWIDTH_HZ,
    settings: ChainSettings = ChainSettings(),
    rng: np.random.Generator | None = None,
) -> SweepResult:
    chain, _ = assemble_chain(topology, model, bandwidth_hz, d2d_distance_range.min_m, settings)
    return run_chain_sweep(chain, d2d_distance_range, model, bandwidth_hz, rng)


def run_baseline_chain(
    topology: Topology,
    d2d_distance_range: DistanceRange,
    model: ChannelModel,
    bandwidth_hz: float = BANDWIDTH_HZ,
    settings: ChainSettings = ChainSettings(),
    rng: np.random.Generator | None = None,
) -> SweepResult:
    """Same chain and channel, but relayed through the lowest-scoring candidate."""
    chain, _ = assemble_chain(topology, model, bandwidth_hz, d2d_distance_range.min_m, settings, baseline=True)
    return run_chain_sweep(chain, d2d_distance_range, model, bandwidth_hz, rng)


def concat(results: Iterable[SweepResult]) -> SweepResult:
    rows: list[SweepRow] = []
    for r in results:
        rows.extend(r.rows)
    return SweepResult(rows)
