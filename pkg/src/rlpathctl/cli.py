"""Command-line pipeline: ingest -> train -> path -> push, plus report/mock.

Exit codes: 0 ok, 1 usage/config, 2 data/validation, 3 transport,
4 training failure. Config comes from an optional JSON or TOML file;
flags win over the file, which wins over environment fallbacks
(RLPATHCTL_CONTROLLER, RLPATHCTL_MOCK_ADDR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ctl, flows, pathfind, policynet, topo, trainer
from .rlenv import PathEnv

log = logging.getLogger(__name__)

ENV_CONTROLLER = "RLPATHCTL_CONTROLLER"
ENV_MOCK_ADDR = "RLPATHCTL_MOCK_ADDR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3
EXIT_TRAINING = 4


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; our table says 1
        raise UsageError(message)


@dataclass
class RunConfig:
    controller: str | None = None
    fixture: Path | None = None
    seed: int = 0
    episodes: int = 1000
    learning_rate: float = 0.01
    step_cap: int | None = None
    weight_mode: str = "unit"
    output_dir: Path = Path("out")
    dry_run: bool = False

    def require_source(self) -> None:
        if bool(self.controller) == bool(self.fixture):
            raise UsageError("exactly one of --controller and --fixture is required")


def _load_config_file(path: Path) -> dict:
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    if path.suffix == ".toml":
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path}: {e}") from None


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        doc = _load_config_file(Path(args.config))
        known = {
            "controller": str,
            "fixture": Path,
            "seed": int,
            "episodes": int,
            "learning_rate": float,
            "step_cap": int,
            "weight_mode": str,
            "output": Path,
            "dry_run": bool,
        }
        for key, value in doc.items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            attr = "output_dir" if key == "output" else key
            setattr(cfg, attr, known[key](value))
    if os.environ.get(ENV_CONTROLLER) and not cfg.controller and not getattr(args, "controller", None):
        cfg.controller = os.environ[ENV_CONTROLLER]
    for flag, attr in [
        ("controller", "controller"),
        ("seed", "seed"),
        ("episodes", "episodes"),
        ("learning_rate", "learning_rate"),
        ("step_cap", "step_cap"),
        ("weight_mode", "weight_mode"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "fixture", None) is not None:
        cfg.fixture = Path(args.fixture)
        if getattr(args, "controller", None) is None:
            cfg.controller = None  # the flag overrides a file/env controller
    elif getattr(args, "controller", None) is not None:
        cfg.fixture = None  # and vice versa
    if getattr(args, "output", None) is not None:
        cfg.output_dir = Path(args.output)
    if getattr(args, "dry_run", False):
        cfg.dry_run = True
    if cfg.weight_mode not in ("unit", "inverse_bandwidth"):
        raise UsageError(f"weight_mode must be unit or inverse_bandwidth, got {cfg.weight_mode!r}")
    if cfg.episodes < 1:
        raise UsageError("episodes must be >= 1")
    return cfg


def find_fixture_pair(fixture_dir: Path) -> tuple[Path, Path]:
    """Locate the links/devices JSON pair inside a fixture directory."""
    if not fixture_dir.is_dir():
        raise UsageError(f"fixture directory not found: {fixture_dir}")
    links = sorted(p for p in fixture_dir.glob("*.json") if "links" in p.name)
    devices = sorted(p for p in fixture_dir.glob("*.json") if "devices" in p.name)
    if len(links) != 1 or len(devices) != 1:
        raise UsageError(
            f"{fixture_dir} must hold exactly one *links*.json and one *devices*.json "
            f"(found {len(links)} and {len(devices)})"
        )
    return links[0], devices[0]


def _fetch_or_read(cfg: RunConfig) -> tuple[bytes, bytes]:
    cfg.require_source()
    if cfg.fixture:
        links_path, devices_path = find_fixture_pair(cfg.fixture)
        return links_path.read_bytes(), devices_path.read_bytes()
    ep = ctl.ControllerEndpoint(cfg.controller)
    return ctl.fetch_topology(ep)


def _out(cfg: RunConfig, name: str) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg.output_dir / name


def _read_artifact(cfg: RunConfig, name: str) -> Path:
    path = cfg.output_dir / name
    if not path.exists():
        raise DataError(f"missing {path}; run the earlier pipeline stage first")
    return path


def _load_topology(cfg: RunConfig) -> topo.Topology:
    doc = json.loads(_read_artifact(cfg, "topology.json").read_text(encoding="utf-8"))
    return topo.topology_from_dict(doc)


def cmd_ingest(cfg: RunConfig) -> int:
    links_json, devices_json = _fetch_or_read(cfg)
    t = topo.parse_topology(links_json, devices_json)
    adj = topo.build_adjacency(t, cfg.weight_mode)
    _out(cfg, "topology.json").write_text(
        json.dumps(topo.topology_to_dict(t), indent=2) + "\n", encoding="utf-8"
    )
    summary = {
        "num_nodes": adj.num_nodes,
        "start_node": adj.start_node,
        "end_node": adj.end_node,
        "start_dpid": adj.dpid_of[adj.start_node],
        "end_dpid": adj.dpid_of[adj.end_node],
        "link_count": len(t.links),
        "weight_mode": cfg.weight_mode,
        "net": adj.net.tolist(),
    }
    _out(cfg, "adjacency.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(
        f"{adj.num_nodes} switches, {len(t.links)} links, "
        f"start {summary['start_dpid']}, end {summary['end_dpid']}"
    )
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    t = _load_topology(cfg)
    adj = topo.build_adjacency(t, cfg.weight_mode)
    env = PathEnv(adj)
    rng = np.random.default_rng(cfg.seed)
    model = policynet.create_model(
        adj.num_nodes, adj.num_nodes, cfg.learning_rate, rng=rng
    )
    model.seed = cfg.seed
    tcfg = trainer.TrainConfig(
        num_episodes=cfg.episodes,
        learning_rate=cfg.learning_rate,
        seed=cfg.seed,
        step_cap=cfg.step_cap,
        log_path=_out(cfg, "trace.csv"),
    )
    try:
        model, _, report = trainer.train(model, env, tcfg, rng=rng)
    except trainer.TrainingError as e:
        if e.net is not None:
            policynet.save_checkpoint(e.net, _out(cfg, "checkpoint-diagnostic.json"))
            log.error("training aborted, diagnostic checkpoint written: %s", e)
        raise
    policynet.save_checkpoint(model, _out(cfg, "checkpoint.json"))
    _out(cfg, "train_report.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    converged = report.converged_at if report.converged_at is not None else "never"
    print(
        f"trained {report.episodes_run} episodes, {report.steps_total} steps, "
        f"converged_at {converged}, aborted {report.aborted_episodes}"
    )
    return EXIT_OK


def cmd_path(cfg: RunConfig) -> int:
    t = _load_topology(cfg)
    adj = topo.build_adjacency(t, cfg.weight_mode)
    model = policynet.load_checkpoint(_read_artifact(cfg, "checkpoint.json"))
    learned = pathfind.greedy_rollout(model, adj)
    if cfg.weight_mode == "inverse_bandwidth":
        oracle = pathfind.dijkstra_shortest(adj, adj.start_node, adj.end_node)
    else:
        oracle = pathfind.bfs_shortest(adj, adj.start_node, adj.end_node)
    verdict = pathfind.compare_paths(learned, oracle, adj)
    _out(cfg, "path.json").write_text(
        json.dumps(
            {"nodes": list(learned.nodes), "dpids": list(learned.dpids), "hops": learned.hops},
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    _out(cfg, "verdict.json").write_text(
        json.dumps(verdict.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(json.dumps(verdict.to_dict(), separators=(",", ":")))
    return EXIT_OK


def cmd_push(cfg: RunConfig) -> int:
    t = _load_topology(cfg)
    path_doc = json.loads(_read_artifact(cfg, "path.json").read_text(encoding="utf-8"))
    path = pathfind.Path(tuple(path_doc["nodes"]), tuple(path_doc["dpids"]))
    batch = flows.compile_flows(path, t)
    if cfg.dry_run:
        lines = [flows.render_entry(e).decode("utf-8") for e in batch.entries]
        _out(cfg, "flows.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(json.dumps({"dry_run": True, "entries": len(batch.entries)}))
        return EXIT_OK
    if not cfg.controller:
        raise UsageError("push needs --controller (or --dry-run)")
    ep = ctl.ControllerEndpoint(cfg.controller)
    report = ctl.push_flows(ep, batch)
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def cmd_report(trace_csv: Path, cfg: RunConfig) -> int:
    episodes = _aggregate_trace(trace_csv)
    out_path = _out(cfg, "report.csv")
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("episode,max_start_prob\n")
        for ep, max_p in episodes:
            fh.write(f"{ep},{max_p:.6f}\n")
    converged = next((ep for ep, p in episodes if p >= trainer.CONVERGENCE_THRESHOLD), None)
    if converged is None:
        print("not converged")
    else:
        print(f"converged at episode {converged}")
    return EXIT_OK


def _aggregate_trace(trace_csv: Path) -> list[tuple[int, float]]:
    """Last logged row of each episode -> (episode, max probability)."""
    if not trace_csv.exists():
        raise DataError(f"trace file not found: {trace_csv}")
    episodes: list[tuple[int, float]] = []
    with open(trace_csv, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("episode,step,p_0"):
            raise DataError(f"{trace_csv}: not a trace CSV (bad header)")
        width = len(header.split(","))
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != width:
                raise DataError(f"{trace_csv}:{lineno}: expected {width} columns")
            try:
                ep = int(parts[0])
                max_p = max(float(p) for p in parts[2:])
            except ValueError as e:
                raise DataError(f"{trace_csv}:{lineno}: {e}") from None
            if episodes and ep == episodes[-1][0]:
                episodes[-1] = (ep, max_p)
            elif episodes and ep < episodes[-1][0]:
                raise DataError(f"{trace_csv}:{lineno}: episodes must be non-decreasing")
            else:
                episodes.append((ep, max_p))
    return episodes


def cmd_mock(args) -> int:
    fixture_dir = Path(args.fixture) if args.fixture else None
    if fixture_dir is None:
        raise UsageError("mock needs --fixture DIR")
    links_path, devices_path = find_fixture_pair(fixture_dir)
    bind = args.bind or os.environ.get(ENV_MOCK_ADDR) or "127.0.0.1:8080"
    host, _, port = bind.rpartition(":")
    if not host:
        raise UsageError(f"--bind must be HOST:PORT, got {bind!r}")
    mock = ctl.run_mock_controller(
        (links_path.read_bytes(), devices_path.read_bytes()), (host, int(port))
    )
    print(f"mock controller listening on {mock.base_url}", flush=True)
    try:
        while True:
            mock.join(timeout=3600)
    except KeyboardInterrupt:
        mock.close()
    return EXIT_OK


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML config file; flags win")
    common.add_argument("--controller", help=f"controller base URL (env {ENV_CONTROLLER})")
    common.add_argument("--fixture", help="directory with the links/devices JSON pair")
    common.add_argument("--seed", type=int, help="run seed (default 0)")
    common.add_argument("--episodes", type=int, help="training episodes (default 1000)")
    common.add_argument("--learning-rate", type=float, dest="learning_rate")
    common.add_argument("--step-cap", type=int, dest="step_cap")
    common.add_argument("--weight-mode", dest="weight_mode", choices=["unit", "inverse_bandwidth"])
    common.add_argument("--output", help="artifact directory (default ./out)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="rlpathctl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="fetch or read topology, write normalized model")
    sub.add_parser("train", parents=[common], help="run the episode loop, write checkpoint/trace")
    sub.add_parser("path", parents=[common], help="extract learned path and compare to oracle")
    push = sub.add_parser("push", parents=[common], help="compile and push static flows")
    push.add_argument("--dry-run", action="store_true", help="write flows.jsonl instead of POSTing")
    report = sub.add_parser("report", parents=[common], help="per-episode convergence summary")
    report.add_argument("trace_csv", help="trace CSV produced by train")
    mock = sub.add_parser("mock", parents=[common], help="serve the fixture as a mock controller")
    mock.add_argument("--bind", help=f"HOST:PORT (env {ENV_MOCK_ADDR}, default 127.0.0.1:8080)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr
        )
        if args.command == "mock":
            return cmd_mock(args)
        cfg = _resolve_config(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "path":
            return cmd_path(cfg)
        if args.command == "push":
            return cmd_push(cfg)
        if args.command == "report":
            return cmd_report(Path(args.trace_csv), cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (topo.TopologyError, DataError, pathfind.ExtractionError, pathfind.NoPathError,
            flows.CompileError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ctl.TransportError, ctl.ProtocolError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRANSPORT
    except trainer.TrainingError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRAINING


if __name__ == "__main__":
    sys.exit(main())
