import json

import pytest

from emsim.config import ScenarioConfig, config_from_dict, config_to_dict, dump_config, load_config
from emsim.errors import ConfigError
from emsim.topology import Role


def test_empty_object_gives_reference_defaults():
    cfg = config_from_dict({})
    assert cfg == ScenarioConfig()
    assert cfg.channel.alphas == (2.0, 2.5, 3.0)
    assert cfg.channel.bandwidth_hz == 10e6
    assert cfg.channel.carrier_frequency_hz == 700e6
    assert cfg.sweep.hop_count == 3
    assert cfg.topology.powers_w[Role.BASE_STATION] == 5.0
    assert cfg.topology.powers_w[Role.RELAY] == 2.5
    assert cfg.topology.powers_w[Role.CLUSTER_HEAD] == 1.5
    ranges = {h: (v.min_m, v.max_m) for h, v in cfg.sweep.hops.items()}
    assert ranges == {1: (100.0, 1000.0), 2: (5.0, 250.0), 3: (5.0, 50.0)}


def test_hop_spec_powers_follow_roles():
    cfg = config_from_dict({})
    assert [cfg.hop_spec(h).tx_power_w for h in (1, 2, 3)] == [5.0, 2.5, 1.5]
    assert cfg.hop_spec(3).interferer_count == 2


def test_alpha_below_one_rejected():
    with pytest.raises(ConfigError, match="path_loss_exponent ≥ 1") as exc:
        config_from_dict({"channel": {"alphas": [2.0, 0.5]}})
    assert exc.value.key == "channel.alphas[1]"


@pytest.mark.parametrize(
    "data,key",
    [
        ({"bogus": 1}, "bogus"),
        ({"channel": {"alpha": [2]}}, "channel.alpha"),
        ({"sweep": {"hops": {"4": {}}}}, "sweep.hops.4"),
        ({"topology": {"powers_w": {"drone": 1.0}}}, "topology.powers_w.drone"),
    ],
)
def test_unknown_keys_rejected(data, key):
    with pytest.raises(ConfigError, match="unknown key") as exc:
        config_from_dict(data)
    assert exc.value.key == key


@pytest.mark.parametrize(
    "data,key",
    [
        ({"channel": {"bandwidth_hz": 0}}, "channel.bandwidth_hz"),
        ({"channel": {"noise_figure_db": -1}}, "channel.noise_figure_db"),
        ({"channel": {"alphas": [2, 2]}}, "channel.alphas"),
        ({"sweep": {"hops": {"1": {"min_m": 500, "max_m": 100}}}}, "sweep.hops.1.max_m"),
        ({"sweep": {"hops": {"2": {"steps": 0}}}}, "sweep.hops.2.steps"),
        ({"sweep": {"hop_count": 0}}, "sweep.hop_count"),
        ({"selection": {"energy_weight": 0.7}}, "selection.quality_weight"),
        ({"topology": {"coverage_radius_m": -5}}, "topology.coverage_radius_m"),
        ({"topology": {"cluster": {"region": [0, 0, 0, 1]}}}, "topology.cluster.region"),
        ({"seed": "abc"}, "seed"),
        ({"channel": {"fading": {"type": "rician"}}}, "channel.fading.type"),
    ],
)
def test_constraint_violations_name_key(data, key):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(data)
    assert exc.value.key == key


def test_round_trip(tmp_path):
    path = tmp_path / "defaults.json"
    path.write_text(dump_config(ScenarioConfig()))
    assert load_config(path) == ScenarioConfig()


def test_round_trip_non_default(tmp_path):
    data = {
        "seed": 7,
        "channel": {"alphas": [2.1, 2.3, 2.8], "fading": {"type": "rayleigh", "trials": 50}, "noise_figure_db": 5},
        "topology": {"extra_devices": [[950, 0]], "relay_candidates": 0,
                     "initial_energy_j": {"relay": 20, "base_station": None}},
        "sweep": {"hops": {"3": {"interferers": 0, "steps": 4}}},
    }
    cfg = config_from_dict(data)
    again = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert again == cfg
    assert cfg.channel.models()[0].fading.trials == 50


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "nope.json")


def test_parse_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(json.JSONDecodeError):
        load_config(p)
