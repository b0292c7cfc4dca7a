"""Relay and cluster-head election.

Relays are ranked by a convex mix of max-normalised residual energy and
received-SNR link quality from the BS. Cluster heads must hold more energy
than a threshold; among those the most charged node wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .channel import ChannelModel, noise_power, path_gain
from .errors import ClusterIsolatedError, NoRelayCandidateError
from .topology import Node, Point, point_distance

DEFAULT_SNR_REF = 1e3  # 30 dB


@dataclass(frozen=True)
class SelectionWeights:
    energy_weight: float = 0.5
    quality_weight: float = 0.5

    def __post_init__(self):
        for name in ("energy_weight", "quality_weight"):
            w = getattr(self, name)
            if not 0 <= w <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {w}")
        if abs(self.energy_weight + self.quality_weight - 1.0) > 1e-12:
            raise ValueError("energy_weight + quality_weight must equal 1")


@dataclass(frozen=True)
class SelectionOutcome:
    chosen: int
    score: float
    ranking: tuple[tuple[int, float], ...]

    @property
    def worst(self) -> int:
        """Lowest-scoring node, ties to the smallest id."""
        low = min(score for _, score in self.ranking)
        return min(nid for nid, score in self.ranking if score == low)


def link_quality(
    model: ChannelModel,
    tx: Node,
    rx_position: Point,
    bandwidth: float,
    snr_ref: float = DEFAULT_SNR_REF,
) -> float:
    """Interference-free received SNR normalised by ``snr_ref`` and clamped to 1."""
    d = point_distance(tx.position, rx_position)
    snr = tx.tx_power_w * path_gain(model, d) / noise_power(model, bandwidth)
    return min(1.0, snr / snr_ref)


def _outcome(scored: list[tuple[int, float]]) -> SelectionOutcome:
    ranking = tuple(sorted(scored, key=lambda item: (-item[1], item[0])))
    return SelectionOutcome(chosen=ranking[0][0], score=ranking[0][1], ranking=ranking)


def select_relay(
    candidates: Sequence[Node],
    bs: Node,
    model: ChannelModel,
    bandwidth: float,
    weights: SelectionWeights = SelectionWeights(),
    snr_ref: float = DEFAULT_SNR_REF,
) -> SelectionOutcome:
    if not candidates:
        raise NoRelayCandidateError()
    e_max = max(n.residual_energy_j for n in candidates)
    scored = []
    for n in candidates:
        energy = n.residual_energy_j / e_max if e_max > 0 else 0.0
        quality = link_quality(model, bs, n.position, bandwidth, snr_ref)
        scored.append((n.id, weights.energy_weight * energy + weights.quality_weight * quality))
    return _outcome(scored)


def select_cluster_head(
    cluster_nodes: Sequence[Node],
    relay: Node,
    model: ChannelModel,
    bandwidth: float,
    energy_threshold_j: float,
    snr_ref: float = DEFAULT_SNR_REF,
) -> SelectionOutcome:
    """Elect the most charged node above ``energy_threshold_j``.

    Ties on energy go to the better link from ``relay``, then to the smaller
    id. The outcome's score is the winner's energy over the eligible maximum
    (always 1.0 for the winner); the ranking lists eligible nodes only.
    """
    eligible = [n for n in cluster_nodes if n.residual_energy_j > energy_threshold_j]
    if not eligible:
        raise ClusterIsolatedError()
    e_max = max(n.residual_energy_j for n in eligible)
    keyed = sorted(
        eligible,
        key=lambda n: (
            -n.residual_energy_j,
            -link_quality(model, relay, n.position, bandwidth, snr_ref),
            n.id,
        ),
    )
    ranking = tuple((n.id, n.residual_energy_j / e_max if e_max > 0 else 0.0) for n in keyed)
    return SelectionOutcome(chosen=ranking[0][0], score=ranking[0][1], ranking=ranking)
