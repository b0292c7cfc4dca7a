"""Scenario configuration: JSON in, validated frozen dataclasses out.

Every omitted key takes its documented default (the reference scenario where
one exists). Unknown keys are rejected. Validation errors name the dotted key path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .channel import ChannelModel, Rayleigh
from .errors import ConfigError
from .scenario import (
    ALPHAS,
    BANDWIDTH_HZ,
    DEFAULT_INTERFERERS,
    DEFAULT_RANGES,
    HOP_COUNT,
    INTERFERER_DISTANCE_FACTOR,
    ChainSettings,
    DistanceRange,
    HopSpec,
)
from .selection import SelectionWeights
from .topology import (
    DEFAULT_ENERGY_J,
    DEFAULT_POWERS_W,
    PoissonClusterParams,
    Role,
    Topology,
    build_scenario_topology,
    place_edge_devices,
    place_poisson_cluster,
)

DEFAULT_SEED = 42


@dataclass(frozen=True)
class ChannelSettings:
    alphas: tuple[float, ...] = ALPHAS
    carrier_frequency_hz: float = 700e6
    reference_distance_m: float = 1.0
    noise_temperature_k: float = 290.0
    noise_figure_db: float = 0.0
    fading_trials: int | None = None  # None disables Rayleigh fading
    bandwidth_hz: float = BANDWIDTH_HZ

    def models(self) -> list[ChannelModel]:
        fading = None if self.fading_trials is None else Rayleigh(self.fading_trials)
        return [
            ChannelModel(a, self.carrier_frequency_hz, self.reference_distance_m,
                         self.noise_temperature_k, self.noise_figure_db, fading)
            for a in self.alphas
        ]


@dataclass(frozen=True)
class TopologySettings:
    bs_position: tuple[float, float] = (0.0, 0.0)
    coverage_radius_m: float = 1000.0
    powers_w: dict = field(default_factory=lambda: dict(DEFAULT_POWERS_W))
    initial_energy_j: dict = field(default_factory=lambda: dict(DEFAULT_ENERGY_J))
    cluster: PoissonClusterParams = PoissonClusterParams()
    relay_candidates: int = 5
    relay_sector_deg: tuple[float, float] = (-15.0, 15.0)
    extra_devices: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class SelectionSettings:
    energy_weight: float = 0.5
    quality_weight: float = 0.5
    ch_energy_threshold_j: float = 10.0
    snr_ref_db: float = 30.0


@dataclass(frozen=True)
class HopSettings:
    min_m: float
    max_m: float
    steps: int
    interferers: int


def _default_hops() -> dict:
    return {
        h: HopSettings(*DEFAULT_RANGES[h], DEFAULT_INTERFERERS[h]) for h in (1, 2, 3)
    }


@dataclass(frozen=True)
class SweepSettings:
    hop_count: int = HOP_COUNT
    interferer_distance_factor: float = INTERFERER_DISTANCE_FACTOR
    hops: dict = field(default_factory=_default_hops)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = DEFAULT_SEED
    channel: ChannelSettings = ChannelSettings()
    topology: TopologySettings = TopologySettings()
    selection: SelectionSettings = SelectionSettings()
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: OutputSettings = OutputSettings()

    def hop_spec(self, hop: int) -> HopSpec:
        h = self.sweep.hops[hop]
        role = {1: Role.BASE_STATION, 2: Role.RELAY, 3: Role.CLUSTER_HEAD}[hop]
        return HopSpec(hop, self.topology.powers_w[role], DistanceRange(h.min_m, h.max_m, h.steps),
                       h.interferers, self.sweep.interferer_distance_factor)

    def chain_settings(self) -> ChainSettings:
        s = self.selection
        return ChainSettings(
            weights=SelectionWeights(s.energy_weight, s.quality_weight),
            snr_ref=10.0 ** (s.snr_ref_db / 10.0),
            ch_energy_threshold_j=s.ch_energy_threshold_j,
            d2d_power_w=self.topology.powers_w[Role.CLUSTER_HEAD],
            d2d_interferers=self.sweep.hops[3].interferers,
            interferer_distance_factor=self.sweep.interferer_distance_factor,
        )

    def build_topology(self, seed: int) -> Topology:
        t = self.topology
        layout = place_poisson_cluster(t.cluster, seed)
        edge = place_edge_devices(t.relay_candidates, t.bs_position, t.coverage_radius_m, t.relay_sector_deg, seed)
        edge.extend(t.extra_devices)
        return build_scenario_topology(layout, t.bs_position, t.coverage_radius_m,
                                       t.powers_w, t.initial_energy_j, edge)


# -- parsing ---------------------------------------------------------------

class _Section:
    """Strict reader over one JSON object; tracks the dotted path for errors."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", "must be a JSON object")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def get(self, name: str, default: Any) -> Any:
        self.seen.add(name)
        return self.data.get(name, default)

    def number(self, name: str, default: float, check=None, constraint: str = "") -> float:
        value = self.get(name, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(self.key(name), "must be a finite number")
        value = float(value)
        if check is not None and not check(value):
            raise ConfigError(self.key(name), constraint)
        return value

    def integer(self, name: str, default: int, check=None, constraint: str = "") -> int:
        value = self.get(name, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(self.key(name), "must be an integer")
        if check is not None and not check(value):
            raise ConfigError(self.key(name), constraint)
        return value

    def section(self, name: str) -> _Section:
        return _Section(self.get(name, {}), self.key(name))

    def finish(self) -> None:
        unknown = sorted(set(self.data) - self.seen)
        if unknown:
            raise ConfigError(self.key(unknown[0]), "unknown key")


def _point(value: Any, key: str) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in value)):
        raise ConfigError(key, "must be a pair of finite numbers")
    return (float(value[0]), float(value[1]))


def _parse_channel(s: _Section) -> ChannelSettings:
    d = ChannelSettings()
    alphas = s.get("alphas", list(d.alphas))
    if not isinstance(alphas, list) or not alphas:
        raise ConfigError(s.key("alphas"), "must be a non-empty list of numbers")
    parsed = []
    for i, a in enumerate(alphas):
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not math.isfinite(a):
            raise ConfigError(f"{s.key('alphas')}[{i}]", "must be a finite number")
        if not a >= 1:
            raise ConfigError(f"{s.key('alphas')}[{i}]", "path_loss_exponent ≥ 1")
        parsed.append(float(a))
    if len(set(parsed)) != len(parsed):
        raise ConfigError(s.key("alphas"), "path loss exponents must be distinct")
    fading = s.get("fading", None)
    trials = None
    if fading is not None:
        fs = _Section(fading, s.key("fading"))
        kind = fs.get("type", "rayleigh")
        if kind != "rayleigh":
            raise ConfigError(fs.key("type"), "only 'rayleigh' is supported")
        trials = fs.integer("trials", 100, lambda v: v >= 1, "trials ≥ 1")
        fs.finish()
    out = ChannelSettings(
        alphas=tuple(parsed),
        carrier_frequency_hz=s.number("carrier_frequency_hz", d.carrier_frequency_hz, lambda v: v > 0, "carrier_frequency > 0"),
        reference_distance_m=s.number("reference_distance_m", d.reference_distance_m, lambda v: v > 0, "reference_distance > 0"),
        noise_temperature_k=s.number("noise_temperature_k", d.noise_temperature_k, lambda v: v > 0, "noise_temperature > 0"),
        noise_figure_db=s.number("noise_figure_db", d.noise_figure_db, lambda v: v >= 0, "noise_figure_db ≥ 0"),
        fading_trials=trials,
        bandwidth_hz=s.number("bandwidth_hz", d.bandwidth_hz, lambda v: v > 0, "bandwidth > 0"),
    )
    s.finish()
    return out


def _role_map(s: _Section, defaults: dict, allow_unlimited: bool, constraint: str) -> dict:
    out = {}
    for role in Role:
        value = s.get(role.value, None if math.isinf(defaults[role]) else defaults[role])
        if value is None and allow_unlimited:
            out[role] = math.inf
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
            raise ConfigError(s.key(role.value), constraint)
        out[role] = float(value)
    s.finish()
    return out


def _parse_topology(s: _Section) -> TopologySettings:
    d = TopologySettings()
    cs = s.section("cluster")
    dc = d.cluster
    region = cs.get("region", list(dc.region))
    if (not isinstance(region, list) or len(region) != 4
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in region)):
        raise ConfigError(cs.key("region"), "must be [x_min, y_min, x_max, y_max]")
    if not (region[2] > region[0] and region[3] > region[1]):
        raise ConfigError(cs.key("region"), "x_max > x_min and y_max > y_min")
    cluster = PoissonClusterParams(
        parent_intensity=cs.number("parent_intensity", dc.parent_intensity, lambda v: v >= 0, "parent_intensity ≥ 0"),
        mean_cluster_size=cs.number("mean_cluster_size", dc.mean_cluster_size, lambda v: v >= 0, "mean_cluster_size ≥ 0"),
        cluster_radius=cs.number("cluster_radius_m", dc.cluster_radius, lambda v: v >= 0, "cluster_radius ≥ 0"),
        region=tuple(float(v) for v in region),
    )
    cs.finish()

    sector = s.get("relay_sector_deg", list(d.relay_sector_deg))
    sector = _point(sector, s.key("relay_sector_deg"))
    if not sector[0] <= sector[1]:
        raise ConfigError(s.key("relay_sector_deg"), "start ≤ end")
    extra = s.get("extra_devices", [])
    if not isinstance(extra, list):
        raise ConfigError(s.key("extra_devices"), "must be a list of [x, y] pairs")
    extra = tuple(_point(p, f"{s.key('extra_devices')}[{i}]") for i, p in enumerate(extra))

    out = TopologySettings(
        bs_position=_point(s.get("bs_position", list(d.bs_position)), s.key("bs_position")),
        coverage_radius_m=s.number("coverage_radius_m", d.coverage_radius_m, lambda v: v > 0, "coverage_radius_m > 0"),
        powers_w=_role_map(s.section("powers_w"), DEFAULT_POWERS_W, False, "tx_power_w ≥ 0"),
        initial_energy_j=_role_map(s.section("initial_energy_j"), DEFAULT_ENERGY_J, True,
                                   "residual_energy_j ≥ 0 (null = unlimited)"),
        cluster=cluster,
        relay_candidates=s.integer("relay_candidates", d.relay_candidates, lambda v: v >= 0, "relay_candidates ≥ 0"),
        relay_sector_deg=sector,
        extra_devices=extra,
    )
    s.finish()
    return out


def _parse_selection(s: _Section) -> SelectionSettings:
    d = SelectionSettings()
    unit = (lambda v: 0 <= v <= 1, "weight in [0, 1]")
    out = SelectionSettings(
        energy_weight=s.number("energy_weight", d.energy_weight, *unit),
        quality_weight=s.number("quality_weight", d.quality_weight, *unit),
        ch_energy_threshold_j=s.number("ch_energy_threshold_j", d.ch_energy_threshold_j, lambda v: v >= 0, "threshold ≥ 0"),
        snr_ref_db=s.number("snr_ref_db", d.snr_ref_db),
    )
    if abs(out.energy_weight + out.quality_weight - 1.0) > 1e-12:
        raise ConfigError(s.key("quality_weight"), "energy_weight + quality_weight = 1")
    s.finish()
    return out


def _parse_sweep(s: _Section) -> SweepSettings:
    d = SweepSettings()
    hops_section = s.section("hops")
    hops = {}
    for h in (1, 2, 3):
        dh = d.hops[h]
        hs = hops_section.section(str(h))
        hop = HopSettings(
            min_m=hs.number("min_m", dh.min_m, lambda v: v > 0, "min_m > 0"),
            max_m=hs.number("max_m", dh.max_m, lambda v: v > 0, "max_m > 0"),
            steps=hs.integer("steps", dh.steps, lambda v: v >= 1, "steps ≥ 1"),
            interferers=hs.integer("interferers", dh.interferers, lambda v: v >= 0, "interferers ≥ 0"),
        )
        if hop.min_m > hop.max_m:
            raise ConfigError(hs.key("max_m"), "min_m ≤ max_m")
        hs.finish()
        hops[h] = hop
    hops_section.finish()
    out = SweepSettings(
        hop_count=s.integer("hop_count", d.hop_count, lambda v: v >= 1, "hop_count ≥ 1"),
        interferer_distance_factor=s.number("interferer_distance_factor", d.interferer_distance_factor,
                                            lambda v: v > 0, "interferer_distance_factor > 0"),
        hops=hops,
    )
    s.finish()
    return out


def config_from_dict(data: Any) -> ScenarioConfig:
    root = _Section(data, "")
    seed = root.integer("seed", DEFAULT_SEED, lambda v: v >= 0, "seed ≥ 0")
    cfg = ScenarioConfig(
        seed=seed,
        channel=_parse_channel(root.section("channel")),
        topology=_parse_topology(root.section("topology")),
        selection=_parse_selection(root.section("selection")),
        sweep=_parse_sweep(root.section("sweep")),
        output=OutputSettings(directory=_parse_output(root.section("output"))),
    )
    root.finish()
    return cfg


def _parse_output(s: _Section) -> str:
    directory = s.get("directory", ".")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(s.key("directory"), "must be a non-empty string")
    s.finish()
    return directory


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a JSON config file.

    Raises ``OSError`` when the file cannot be read, ``json.JSONDecodeError``
    on malformed JSON and :class:`ConfigError` on constraint violations.
    """
    text = Path(path).read_text(encoding="utf-8")
    return config_from_dict(json.loads(text))


def config_to_dict(cfg: ScenarioConfig) -> dict:
    ch, tp, sel, sw = cfg.channel, cfg.topology, cfg.selection, cfg.sweep
    return {
        "seed": cfg.seed,
        "channel": {
            "alphas": list(ch.alphas),
            "carrier_frequency_hz": ch.carrier_frequency_hz,
            "reference_distance_m": ch.reference_distance_m,
            "noise_temperature_k": ch.noise_temperature_k,
            "noise_figure_db": ch.noise_figure_db,
            "fading": None if ch.fading_trials is None else {"type": "rayleigh", "trials": ch.fading_trials},
            "bandwidth_hz": ch.bandwidth_hz,
        },
        "topology": {
            "bs_position": list(tp.bs_position),
            "coverage_radius_m": tp.coverage_radius_m,
            "powers_w": {r.value: tp.powers_w[r] for r in Role},
            "initial_energy_j": {
                r.value: None if math.isinf(tp.initial_energy_j[r]) else tp.initial_energy_j[r] for r in Role
            },
            "cluster": {
                "parent_intensity": tp.cluster.parent_intensity,
                "mean_cluster_size": tp.cluster.mean_cluster_size,
                "cluster_radius_m": tp.cluster.cluster_radius,
                "region": list(tp.cluster.region),
            },
            "relay_candidates": tp.relay_candidates,
            "relay_sector_deg": list(tp.relay_sector_deg),
            "extra_devices": [list(p) for p in tp.extra_devices],
        },
        "selection": {
            "energy_weight": sel.energy_weight,
            "quality_weight": sel.quality_weight,
            "ch_energy_threshold_j": sel.ch_energy_threshold_j,
            "snr_ref_db": sel.snr_ref_db,
        },
        "sweep": {
            "hop_count": sw.hop_count,
            "interferer_distance_factor": sw.interferer_distance_factor,
            "hops": {
                str(h): {"min_m": v.min_m, "max_m": v.max_m, "steps": v.steps, "interferers": v.interferers}
                for h, v in sorted(sw.hops.items())
            },
        },
        "output": {"directory": cfg.output.directory},
    }


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, ensure_ascii=False) + "\n"
