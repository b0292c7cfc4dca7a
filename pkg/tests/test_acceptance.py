"""Exit criteria. Each test prints one PASS/FAIL line (collected in the
terminal summary) and enforces its wall-clock budget."""

import contextlib
import csv
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from emsim.channel import ChannelModel, Transmitter, capacity, energy_efficiency, path_gain, sinr
from emsim.cli import main
from emsim.config import config_from_dict
from emsim.errors import ClusterIsolatedError
from emsim.scenario import ALPHAS, DistanceRange, HopSpec, run_baseline_chain, run_hop_sweep, run_proposed_chain
from emsim.selection import SelectionWeights, select_cluster_head, select_relay
from emsim.topology import Node, PoissonClusterParams, Role, place_poisson_cluster

REPORT: list[str] = []
GOLDEN = Path(__file__).parent / "golden"


@contextlib.contextmanager
def criterion(number, title, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        REPORT.append(f"FAIL  {number:>2}. {title} ({elapsed:.2f}s): {exc}")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget_s
    REPORT.append(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title} ({elapsed:.2f}s, budget {budget_s}s)")
    assert ok, f"criterion {number} took {elapsed:.2f}s, budget {budget_s}s"


def rel_err(a, b):
    return abs(a - b) / abs(b) if b else abs(a)


def read_csv(path):
    with open(path, newline="") as fh:
        header, *rows = list(csv.reader(fh))
    return header, rows


def test_01_formula_oracles():
    with criterion(1, "sinr/capacity/EE match hand oracles to 1e-12", 1.0):
        rng = random.Random(1)
        # worked examples first
        assert rel_err(sinr(Transmitter(5.0, 1e-10), [], 4e-14), 12500.0) <= 1e-12
        assert capacity(10e6, [1.0]) == 1e7 and capacity(10e6, [0.0]) == 0.0
        assert capacity(10e6, [3.0, 3.0]) == 4e7
        assert rel_err(energy_efficiency(1e7, 3, 5.0), 1e7 / 15) <= 1e-12
        for _ in range(50):
            n = rng.randint(1, 5)
            ps = [rng.uniform(0.01, 10) for _ in range(n)]
            hs = [10 ** rng.uniform(-12, 0) for _ in range(n)]
            noise = 10 ** rng.uniform(-15, -9)
            got = sinr(Transmitter(ps[0], hs[0]), [Transmitter(p, h) for p, h in zip(ps[1:], hs[1:])], noise)
            assert rel_err(got, oracles.sinr_sum_minus_self(ps, hs, 0, noise)) <= 1e-12

            bw = rng.uniform(1e5, 1e8)
            sinrs = [10 ** rng.uniform(-3, 6) for _ in range(rng.randint(1, 4))]
            c = capacity(bw, sinrs)
            assert rel_err(c, oracles.shannon(bw, sinrs)) <= 1e-12

            h, p = rng.randint(1, 6), rng.uniform(0.1, 10)
            assert rel_err(energy_efficiency(c, h, p), c / h / p) <= 1e-12


def test_02_sinr_brute_force_equivalence():
    with criterion(2, "SINR equals exact sum-minus-self form on 1000 instances", 5.0):
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 6))
            ps = rng.uniform(0.0, 10.0, n).tolist()
            hs = (10.0 ** rng.uniform(-12, 0, n)).tolist()
            noise = float(10.0 ** rng.uniform(-15, -6))
            i = int(rng.integers(0, n))
            others = [Transmitter(p, h) for k, (p, h) in enumerate(zip(ps, hs)) if k != i]
            got = sinr(Transmitter(ps[i], hs[i]), others, noise)
            worst = max(worst, rel_err(got, oracles.sinr_sum_minus_self(ps, hs, i, noise)))
        assert worst <= 1e-12, worst


def test_03_trend_reproduction(tmp_path):
    with criterion(3, "EE strictly decreasing in distance for hops 1-3 (defaults)", 5.0):
        for hop, span in ((1, (100.0, 1000.0)), (2, (5.0, 250.0)), (3, (5.0, 50.0))):
            out = tmp_path / f"hop{hop}.csv"
            assert main(["sweep", "--hop", str(hop), "--out", str(out)]) == 0
            _, rows = read_csv(out)
            for alpha in ALPHAS:
                group = [r for r in rows if float(r[2]) == alpha]
                d = [float(r[1]) for r in group]
                ee = [float(r[7]) for r in group]
                assert (d[0], d[-1]) == span
                assert all(a > b for a, b in zip(ee, ee[1:])), (hop, alpha)
        # hop 3 must actually be interference-limited for the check to mean anything
        assert config_from_dict({}).sweep.hops[3].interferers > 0


def test_04_gain_decreasing_in_alpha():
    with criterion(4, "path gain strictly decreasing in alpha for d > d0 (100-point grid)", 1.0):
        distances = np.geomspace(1.01, 1000.0, 100)
        alphas = np.linspace(1.0, 6.0, 100)
        for d in distances:
            g = [path_gain(ChannelModel(float(a)), float(d)) for a in alphas]
            assert all(x > y for x, y in zip(g, g[1:])), d


def test_05_scaling_laws():
    with criterion(5, "doubling H halves EE; scaling powers and noise keeps SINR", 5.0):
        models = [ChannelModel(a) for a in ALPHAS]
        doubled_noise = [ChannelModel(a, noise_temperature=2 * 290.0) for a in ALPHAS]
        for hop in (1, 2, 3):
            spec = HopSpec.default(hop)
            base = run_hop_sweep(spec, models, 10e6, 3)
            twice_h = run_hop_sweep(spec, models, 10e6, 6)
            for a, b in zip(base, twice_h):
                assert b.capacity_bps == a.capacity_bps
                assert rel_err(b.ee_bits_per_joule, a.ee_bits_per_joule / 2) <= 1e-12
            loud = HopSpec(hop, 2 * spec.tx_power_w, spec.distance_range, spec.interferer_count)
            scaled = run_hop_sweep(loud, doubled_noise, 10e6, 3)
            for a, b in zip(base, scaled):
                assert rel_err(b.sinr_linear, a.sinr_linear) <= 1e-12


def test_06_selection_oracle():
    with criterion(6, "relay / cluster-head election matches brute force on 1000 instances", 5.0):
        rng = random.Random(6)
        bw = 10e6
        bs = Node(0, Role.BASE_STATION, 0.0, 0.0, 5.0, math.inf)
        for k in range(1000):
            alpha = rng.choice(ALPHAS)
            model = ChannelModel(alpha)
            n = rng.randint(1, 6)
            w_e = rng.choice([0.0, 0.25, 0.5, 1.0, rng.random()])
            weights = SelectionWeights(w_e, 1.0 - w_e)
            energy = lambda: rng.choice([0.0, 25.0, 50.0, 100.0, rng.uniform(0, 100)])  # noqa: E731
            cands = [Node(i + 1, Role.RELAY, rng.uniform(300, 1000), rng.uniform(-400, 400), 2.5, energy())
                     for i in range(n)]
            rng.shuffle(cands)
            out = select_relay(cands, bs, model, bw, weights)
            best, _ = oracles.brute_relay([(c.id, c.x, c.y, c.residual_energy_j) for c in cands], (0, 0), 5.0,
                                          alpha, 700e6, bw, weights.energy_weight, weights.quality_weight)
            assert out.chosen == best, k

            relay = Node(99, Role.RELAY, 950.0, 0.0, 2.5, 100.0)
            members = [Node(i + 1, Role.CLUSTER_MEMBER, rng.uniform(1000, 2500), rng.uniform(-500, 500), 1.5,
                            rng.choice([5.0, 20.0, 40.0, rng.uniform(0, 60)])) for i in range(n)]
            threshold = rng.choice([0.0, 10.0, 20.0, rng.uniform(0, 60)])
            expect = oracles.brute_cluster_head([(m.id, m.x, m.y, m.residual_energy_j) for m in members],
                                                (950.0, 0.0), 2.5, alpha, 700e6, bw, threshold)
            if expect is None:
                with pytest.raises(ClusterIsolatedError):
                    select_cluster_head(members, relay, model, bw, threshold)
            else:
                assert select_cluster_head(members, relay, model, bw, threshold).chosen == expect, k


def test_07_chain_dominance():
    # With the default co-channel D2D interferers the hop-3 capacity (about
    # B*log2(1 + 2^alpha/2)) sits far below hops 1 and 2 for every alpha, so
    # relay choice cannot change the bottleneck. The comparison therefore runs
    # with an interference-free D2D hop, the setting where relay choice matters.
    with criterion(7, "proposed EE >= baseline everywhere; strict in >= 80/100 topologies", 30.0):
        cfg = config_from_dict({"sweep": {"hops": {"3": {"interferers": 0}}}})
        settings = cfg.chain_settings()
        d2d = DistanceRange(5.0, 50.0, 10)
        models = cfg.channel.models()
        topologies, strict, seed = 0, 0, 0
        while topologies < 100:
            seed += 1
            t = cfg.build_topology(seed)
            if len(t.by_role(Role.RELAY)) < 3:
                continue
            try:
                runs = [(run_proposed_chain(t, d2d, m, 10e6, settings), run_baseline_chain(t, d2d, m, 10e6, settings))
                        for m in models]
            except ClusterIsolatedError:
                continue
            topologies += 1
            better = False
            for proposed, baseline in runs:
                for p, b in zip(proposed, baseline):
                    assert p.ee_bits_per_joule >= b.ee_bits_per_joule, (seed, p, b)
                    better |= p.ee_bits_per_joule > b.ee_bits_per_joule
            strict += better
        REPORT.append(f"      7. strict improvement in {strict}/100 topologies")
        assert strict >= 80, strict


def test_08_determinism(tmp_path):
    with criterion(8, "every CLI subcommand is byte-deterministic", 10.0):
        commands = [["sweep", "--hop", h] for h in ("1", "2", "3", "chain")]
        commands += [["compare"], ["topology"], ["validate"]]
        for i, cmd in enumerate(commands):
            a, b = tmp_path / f"{i}a", tmp_path / f"{i}b"
            assert main(cmd + ["--seed", "123", "--out", str(a)]) == 0
            assert main(cmd + ["--seed", "123", "--out", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes(), cmd


def test_09_poisson_cluster_statistics():
    with criterion(9, "mean member count within 3 SE of lambda*area*mu over 10^4 seeds", 30.0):
        params = PoissonClusterParams(parent_intensity=1e-4, mean_cluster_size=10.0, cluster_radius=20.0,
                                      region=(0.0, 0.0, 1000.0, 1000.0))
        totals = np.array([sum(len(m) for _, m in place_poisson_cluster(params, s)) for s in range(10_000)])
        expected = params.parent_intensity * params.area * params.mean_cluster_size
        se = totals.std(ddof=1) / math.sqrt(len(totals))
        REPORT.append(f"      9. mean {totals.mean():.2f} vs {expected:.0f}, SE {se:.3f}")
        assert abs(totals.mean() - expected) <= 3 * se


def test_10_golden_files(tmp_path):
    with criterion(10, "default-config CSVs for hops 1-3 and chain match committed golden files", 10.0):
        for hop in ("1", "2", "3", "chain"):
            out = tmp_path / f"hop{hop}.csv"
            assert main(["sweep", "--hop", hop, "--out", str(out)]) == 0
            assert out.read_bytes() == (GOLDEN / f"sweep_hop{hop}.csv").read_bytes(), hop
