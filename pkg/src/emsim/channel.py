"""Physical-layer math: path gain, thermal noise, SINR, Shannon capacity, energy efficiency.

All quantities are linear (W, Hz, bit/s); dB appears only in ``noise_figure_db``
and at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class Rayleigh:
    """Rayleigh block fading: power gain multiplied by an Exp(1) draw.

    ``trials`` is the number of independent realisations averaged when a
    link is evaluated (ergodic capacity).
    """

    trials: int = 100

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise DomainError(f"fading trials must be a positive integer, got {self.trials!r}")


@dataclass(frozen=True)
class ChannelModel:
    path_loss_exponent: float = 2.0
    carrier_frequency: float = 700e6
    reference_distance: float = 1.0
    noise_temperature: float = 290.0
    noise_figure_db: float = 0.0
    fading: Rayleigh | None = None

    def __post_init__(self):
        if not self.path_loss_exponent >= 1:
            raise DomainError("path_loss_exponent ≥ 1")
        if not self.carrier_frequency > 0:
            raise DomainError("carrier_frequency > 0")
        if not self.reference_distance > 0:
            raise DomainError("reference_distance > 0")
        if not self.noise_temperature > 0:
            raise DomainError("noise_temperature > 0")
        if not self.noise_figure_db >= 0:
            raise DomainError("noise_figure_db ≥ 0")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency


@dataclass(frozen=True)
class Transmitter:
    """A transmitter as seen by one receiver: power ``p`` and linear gain ``h``."""

    power_w: float
    gain: float

    def __post_init__(self):
        if not self.power_w >= 0:
            raise DomainError(f"transmit power must be >= 0, got {self.power_w}")
        if not 0 < self.gain <= 1:
            raise DomainError(f"gain must lie in (0, 1], got {self.gain}")

    @property
    def received_w(self) -> float:
        return self.power_w * self.gain


@dataclass(frozen=True)
class LinkMetrics:
    gain: float
    sinr: float
    capacity_bps: float
    ee_bits_per_joule: float


def path_gain(model: ChannelModel, distance: float) -> float:
    """Log-distance gain anchored to free space at the reference distance.

    g(d) = (λ / (4π d0))² · (d / d0)^(-α) for d ≥ d0, and g(d0) below d0.
    """
    if not distance > 0:
        raise DomainError(f"distance must be > 0, got {distance}")
    d0 = model.reference_distance
    anchor = (model.wavelength / (4.0 * math.pi * d0)) ** 2
    if distance <= d0:
        return min(anchor, 1.0)
    return min(anchor * (distance / d0) ** (-model.path_loss_exponent), 1.0)


def noise_power(model: ChannelModel, bandwidth: float) -> float:
    """Thermal noise kTB degraded by the receiver noise figure, in W."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    return BOLTZMANN * model.noise_temperature * bandwidth * 10.0 ** (model.noise_figure_db / 10.0)


def sinr(signal: Transmitter, interferers: Iterable[Transmitter], noise_w: float) -> float:
    """Linear SINR of ``signal`` against co-channel ``interferers`` plus noise."""
    if not noise_w > 0:
        raise DomainError(f"noise power must be > 0, got {noise_w}")
    interference = 0.0
    for tx in interferers:
        interference += tx.received_w
    return signal.received_w / (interference + noise_w)


def capacity(bandwidth: float, sinr_values: Iterable[float]) -> float:
    """Shannon capacity summed over parallel routes: Σ B·log2(1 + SINR)."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    total = 0.0
    for s in sinr_values:
        if not s >= 0:
            raise DomainError(f"sinr must be >= 0, got {s}")
        total += bandwidth * math.log2(1.0 + s)
    return total


def energy_efficiency(capacity_bps: float, hop_count: int, max_tx_power_w: float) -> float:
    """Bits per joule: C / (H · p_max)."""
    if hop_count < 1:
        raise DomainError(f"hop_count must be >= 1, got {hop_count}")
    if not max_tx_power_w > 0:
        raise DomainError(f"max transmit power must be > 0, got {max_tx_power_w}")
    if not capacity_bps >= 0:
        raise DomainError(f"capacity must be >= 0, got {capacity_bps}")
    return capacity_bps / (hop_count * max_tx_power_w)


def apply_fading(gain, fading: Rayleigh | None, rng: np.random.Generator, size: int | None = None):
    """Multiply ``gain`` by a Rayleigh power-fading draw from ``rng``.

    With ``fading=None`` the gain is returned unchanged and ``rng`` is not
    touched. ``size`` draws that many independent realisations as an array.
    """
    if fading is None:
        return gain if size is None else np.full(size, gain, dtype=float)
    if size is None:
        return gain * float(rng.exponential(1.0))
    return gain * rng.exponential(1.0, size=size)

