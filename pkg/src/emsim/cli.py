"""Command line entry point: ``emsim {sweep,compare,topology,validate}``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 scenario error (no relay candidate, every cluster isolated).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, config_from_dict, dump_config, load_config
from .errors import ClusterIsolatedError, ConfigError, ScenarioError
from .scenario import (
    DistanceRange,
    SweepResult,
    concat,
    run_baseline_chain,
    run_hop_sweep,
    run_proposed_chain,
)
from .selection import select_cluster_head, select_relay
from .topology import Role

log = logging.getLogger("emsim")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SCENARIO = 0, 1, 2, 3

SWEEP_HEADER = ["hop", "distance_m", "alpha", "bandwidth_hz", "tx_power_w",
                "sinr_linear", "capacity_bps", "ee_bits_per_joule"]
COMPARE_HEADER = ["distance_m", "alpha", "ee_proposed", "ee_baseline", "ee_ratio"]
SEED_ENV = "EMSIM_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    # str(float) is the shortest round-trip repr and locale independent
    w.writerows([[str(v) for v in row] for row in rows])
    return buf.getvalue()


def sweep_csv(result: SweepResult) -> str:
    return _csv(SWEEP_HEADER, (
        (r.hop, r.distance_m, r.alpha, r.bandwidth_hz, r.tx_power_w, r.sinr_linear, r.capacity_bps, r.ee_bits_per_joule)
        for r in result
    ))


def _rng(cfg: ScenarioConfig, seed: int) -> np.random.Generator | None:
    return None if cfg.channel.fading_trials is None else np.random.default_rng(seed)


def _d2d_range(cfg: ScenarioConfig) -> DistanceRange:
    h = cfg.sweep.hops[3]
    return DistanceRange(h.min_m, h.max_m, h.steps)


def run_sweep(cfg: ScenarioConfig, hop: str, seed: int) -> SweepResult:
    models = cfg.channel.models()
    bw = cfg.channel.bandwidth_hz
    rng = _rng(cfg, seed)
    if hop != "chain":
        return run_hop_sweep(cfg.hop_spec(int(hop)), models, bw, cfg.sweep.hop_count, rng)
    topology = cfg.build_topology(seed)
    settings = cfg.chain_settings()
    return concat(run_proposed_chain(topology, _d2d_range(cfg), m, bw, settings, rng) for m in models)


def run_compare(cfg: ScenarioConfig, seed: int) -> list[tuple[float, float, float, float, float]]:
    """Rows of (distance, alpha, proposed EE, baseline EE, ratio) on one topology."""
    topology = cfg.build_topology(seed)
    settings = cfg.chain_settings()
    bw = cfg.channel.bandwidth_hz
    rows = []
    for model in cfg.channel.models():
        # both chains see the same fading draws
        proposed = run_proposed_chain(topology, _d2d_range(cfg), model, bw, settings, _rng(cfg, seed))
        baseline = run_baseline_chain(topology, _d2d_range(cfg), model, bw, settings, _rng(cfg, seed))
        for p, b in zip(proposed, baseline):
            rows.append((p.distance_m, p.alpha, p.ee_bits_per_joule, b.ee_bits_per_joule,
                         p.ee_bits_per_joule / b.ee_bits_per_joule))
    return rows


def topology_report(cfg: ScenarioConfig, seed: int) -> dict:
    topology = cfg.build_topology(seed)
    model = cfg.channel.models()[0]
    settings = cfg.chain_settings()
    bw = cfg.channel.bandwidth_hz
    report = topology.to_dict()
    relay_id = select_relay(topology.by_role(Role.RELAY), topology.base_station, model, bw,
                            settings.weights, settings.snr_ref).chosen
    relay = topology.node(relay_id)
    heads = []
    for i in range(len(topology.clusters)):
        try:
            out = select_cluster_head(topology.cluster_nodes(i), relay, model, bw,
                                      settings.ch_energy_threshold_j, settings.snr_ref)
            heads.append({"cluster": i, "id": out.chosen})
        except ClusterIsolatedError:
            heads.append({"cluster": i, "id": "isolated"})
    report["selection"] = {"relay": relay_id, "cluster_heads": heads}
    return report


def _out_path(args, cfg: ScenarioConfig, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(cfg.output.directory) / default_name


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emsim", description="Three-hop BS/relay/D2D energy-efficiency simulator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, hop=False):
        p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
        p.add_argument("--out", help="output file path")
        p.add_argument("--seed", type=int, help=f"RNG seed (overrides ${SEED_ENV} and the config)")
        if hop:
            p.add_argument("--hop", choices=["1", "2", "3", "chain"], default="1")

    common(sub.add_parser("sweep", help="EE versus distance for one hop or the whole chain"), hop=True)
    common(sub.add_parser("compare", help="proposed vs baseline relay selection"))
    common(sub.add_parser("topology", help="export the generated topology and elections"))
    common(sub.add_parser("validate", help="parse the config and print it with defaults filled in"))
    return parser


def _resolve_seed(args, cfg: ScenarioConfig) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return cfg.seed


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"emsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = load_config(args.config) if args.config else config_from_dict({})
    except OSError as exc:
        print(f"emsim: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"emsim: config parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"emsim: config invalid: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        seed = _resolve_seed(args, cfg)
        if args.command == "validate":
            text = dump_config(cfg)
            if args.out:
                atomic_write(args.out, text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "sweep":
            text = sweep_csv(run_sweep(cfg, args.hop, seed))
            path = _out_path(args, cfg, f"sweep_hop{args.hop}.csv")
        elif args.command == "compare":
            text = _csv(COMPARE_HEADER, run_compare(cfg, seed))
            path = _out_path(args, cfg, "compare.csv")
        else:
            text = json.dumps(topology_report(cfg, seed), indent=2) + "\n"
            path = _out_path(args, cfg, "topology.json")
        atomic_write(path, text)
        log.info("wrote %s", path)
    except UsageError as exc:
        print(f"emsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"emsim: scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"emsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
