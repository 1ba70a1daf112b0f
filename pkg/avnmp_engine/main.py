#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pendulum
from dotenv import load_dotenv

from .handlers.anet import pi_scenario, transmit, write_transmission_report
from .handlers.avnmp_core import AVNMPCore
from .handlers.avnmp_utility import read_samples_csv, write_csv, write_jsonl
from .handlers.complexity import FixedWidthCodec
from .handlers.config import Config
from .handlers.engine import Engine
from .handlers.exceptions import (
    AVNMPError,
    ConfigurationError,
    DomainError,
    FormatError,
    InsufficientDataError,
    ParseError,
)
from .handlers.kmap import (
    export_surface,
    insecurity_levels,
    min_complexity_paths,
    pairwise_flows,
    write_flows,
    write_levels,
    write_path_matrix,
    write_surface,
)
from .handlers.mdl import HypothesisScore, hypothesis_sweep
from .handlers.metrics import (
    SERIES_NAMES,
    complexity_error_join,
    derive_metrics,
    write_join,
    write_metric_series,
)
from .models.kmap_graph import SurfaceMode
from .models.scenario import ScenarioConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

USAGE_ERRORS = (ConfigurationError, FormatError, ParseError, DomainError, OSError)
DEFAULT_GRID = (1, 2, 4, 8, 16, 32)
KMAP_MODES = {"path": SurfaceMode.PATH_HEIGHT, "flow": SurfaceMode.FLOW_LEVEL}


class AVNMPEngine(object):
    def __init__(self, logger: logging.Logger, **setting: Dict[str, Any]) -> None:
        Config.initialize(logger, **setting)

        self.logger = logger
        self.setting = setting
        self.avnmp_core = AVNMPCore(logger, **setting)

    def avnmp_core_graphql(self, **params: Dict[str, Any]) -> Dict[str, Any]:
        return self.avnmp_core.avnmp_core_graphql(**params)

    @staticmethod
    def build_graphql_schema():
        return AVNMPCore.build_graphql_schema()

    def simulate(
        self, scenario: ScenarioConfig, out_dir: str | Path
    ) -> Dict[str, Any]:
        out_dir = Path(out_dir)
        trace_samples = (
            read_samples_csv(scenario.workload_trace) if scenario.workload == "trace" else None
        )
        trace = Engine(scenario, logger=self.logger, trace_samples=trace_samples).run()
        series = derive_metrics(trace)

        outputs = [write_jsonl(out_dir / "events.jsonl", (e.to_dict() for e in trace.events))]
        outputs.extend(write_metric_series(out_dir, series))
        try:
            join = complexity_error_join(
                trace.workload_samples(),
                series["prediction_error"],
                scenario.sliding_window,
                FixedWidthCodec(Config.sample_width),
                Config.estimator,
            )
            outputs.append(write_join(out_dir / "complexity_error.csv", join))
            self.logger.info(f"Complexity/error rank correlation: {join.rho}")
        except InsufficientDataError as e:
            self.logger.warning(f"Complexity/error join skipped: {e}")

        summary = {
            "created_at": pendulum.now("UTC").to_iso8601_string(),
            "seed": scenario.seed,
            "scenario": scenario.model_dump(),
            "counters": trace.counters,
            "outputs": [path.name for path in outputs],
        }
        (out_dir / "run.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8"
        )
        self.logger.info(f"Wrote {len(outputs)} files to {out_dir}")
        return summary

    def mdl(self, trace_path: str | Path, grid: Sequence[int]) -> List[HypothesisScore]:
        samples = read_samples_csv(trace_path)
        if not samples:
            raise FormatError(f"{trace_path}: trace holds no samples")
        return hypothesis_sweep(grid, samples)

    def pidemo(
        self,
        precision: int,
        capacities: Dict[int, float] | None = None,
        topology_path: str | Path | None = None,
        out_dir: str | Path | None = None,
    ) -> List[List[Any]]:
        topo, routes, packets = pi_scenario(precision, capacities)
        if topology_path is not None:
            topo, routes = Config.load_topology(topology_path)
        report = transmit(topo, routes, packets)
        if out_dir is not None:
            write_transmission_report(Path(out_dir) / "transmission.csv", report)

        loads = [report.load_for(index) for index in range(len(packets))]
        rows = []
        for link_id in sorted(topo.links):
            capacity = topo.links[link_id].capacity
            rows.append(
                [
                    link_id,
                    capacity,
                    loads[0].get(link_id, 0),
                    loads[1].get(link_id, 0),
                    loads[0].get(link_id, 0) / capacity,
                    loads[1].get(link_id, 0) / capacity,
                ]
            )
        return rows

    def kmap(self, graph_path: str | Path, out_dir: str | Path, mode: SurfaceMode) -> List[Path]:
        out_dir = Path(out_dir)
        graph = Config.load_kmap_spec(graph_path)
        flows = pairwise_flows(graph)
        outputs = [
            write_path_matrix(out_dir / "min_paths.csv", graph, min_complexity_paths(graph)),
            write_flows(out_dir / "flows.csv", flows),
            write_levels(out_dir / "levels.csv", insecurity_levels(graph, flows)),
            write_surface(out_dir / "surface.csv", export_surface(graph, mode)),
        ]
        self.logger.info(f"K-Map analysis of {len(graph.nodes)} nodes written to {out_dir}")
        return outputs


def _parse_grid(text: str) -> List[int]:
    try:
        grid = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid '{text}' is not a comma-separated integer list")
    if not grid or min(grid) < 1:
        raise argparse.ArgumentTypeError("grid needs at least one window size >= 1")
    return grid


def _parse_capacities(text: str) -> Dict[int, float]:
    try:
        return {
            int(key): float(value)
            for key, value in (item.split("=", 1) for item in text.split(",") if item.strip())
        }
    except ValueError:
        raise argparse.ArgumentTypeError(f"capacity '{text}' is not link=rate[,link=rate]")


def _parse_override(text: str) -> tuple:
    key, separator, value = text.partition("=")
    if not separator or not key.strip():
        raise argparse.ArgumentTypeError(f"override '{text}' is not key=value")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avnmp",
        description="Predictive network management by optimistic simulation.",
    )
    parser.add_argument("--log-level", default=None, help="logging level (AVNMP_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run a scenario and derive its metrics")
    simulate.add_argument("scenario", help="INI scenario file")
    simulate.add_argument("--out", default=None, help="output directory (AVNMP_OUT_DIR)")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument(
        "--set", dest="overrides", action="append", type=_parse_override, default=[],
        metavar="KEY=VALUE", help="scenario override, e.g. tolerance.start=400",
    )

    mdl = commands.add_parser("mdl", help="score hypotheses over a sample trace")
    mdl.add_argument("trace", help="CSV with time_s,value columns")
    mdl.add_argument("--grid", type=_parse_grid, default=list(DEFAULT_GRID))
    mdl.add_argument("--out", default=None, help="also write the table as CSV here")

    pidemo = commands.add_parser("pidemo", help="algorithmic versus static packet load")
    pidemo.add_argument("--precision", type=int, default=1000)
    pidemo.add_argument("--capacity", type=_parse_capacities, default=None)
    pidemo.add_argument("--topology", default=None, help="INI topology file")
    pidemo.add_argument("--out", default=None, help="also write the table as CSV here")

    kmap = commands.add_parser("kmap", help="K-Map paths, flows, levels and surface")
    kmap.add_argument("graph", help="INI K-Map graph file")
    kmap.add_argument("--mode", choices=sorted(KMAP_MODES), default="path")
    kmap.add_argument("--out", default=None, help="output directory (AVNMP_OUT_DIR)")

    return parser


def cmd_simulate(engine: AVNMPEngine, args: argparse.Namespace) -> int:
    overrides = dict(args.overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
    scenario = Config.load_scenario(args.scenario, **overrides)
    summary = engine.simulate(scenario, args.out or Config.out_dir)
    print(f"{len(SERIES_NAMES)} metric series written to {args.out or Config.out_dir}")
    for key in sorted(summary["counters"]):
        print(f"{key:>24} {summary['counters'][key]}")
    return EXIT_OK


def cmd_mdl(engine: AVNMPEngine, args: argparse.Namespace) -> int:
    scores = engine.mdl(args.trace, args.grid)
    print(f"{'w':>6} {'sum|error|':>12} {'dl_bits':>10}")
    for score in scores:
        marker = " *" if score.selected else ""
        print(f"{score.w:>6} {score.summed_abs_error:>12} {score.description_length:>10}{marker}")
    if args.out:
        write_csv(
            Path(args.out) / "mdl.csv",
            ("w", "summed_abs_error", "description_length_bits", "selected"),
            ((s.w, s.summed_abs_error, s.description_length, int(s.selected)) for s in scores),
        )
    return EXIT_OK


def cmd_pidemo(engine: AVNMPEngine, args: argparse.Namespace) -> int:
    if args.precision < 1:
        raise DomainError(f"precision {args.precision} must be at least 1")
    rows = engine.pidemo(args.precision, args.capacity, args.topology, args.out)
    header = ("link", "capacity", "algorithmic_bytes", "static_bytes", "algorithmic_s", "static_s")
    print(" ".join(f"{name:>17}" for name in header))
    for row in rows:
        print(" ".join(f"{cell:>17.6g}" if isinstance(cell, float) else f"{cell:>17}" for cell in row))
    if args.out:
        write_csv(Path(args.out) / "pidemo.csv", header, rows)
    return EXIT_OK


def cmd_kmap(engine: AVNMPEngine, args: argparse.Namespace) -> int:
    for path in engine.kmap(args.graph, args.out or Config.out_dir, KMAP_MODES[args.mode]):
        print(path)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "mdl": cmd_mdl,
    "pidemo": cmd_pidemo,
    "kmap": cmd_kmap,
}


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    log_level = (args.log_level or os.getenv("AVNMP_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    logger = logging.getLogger()

    try:
        engine = AVNMPEngine(logger, log_level=log_level, out_dir=getattr(args, "out", None))
        return COMMANDS[args.command](engine, args)
    except USAGE_ERRORS as e:
        print(f"avnmp {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AVNMPError as e:
        logger.exception(f"avnmp {args.command} failed")
        print(f"avnmp {args.command}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception("Fatal error")
        print(f"avnmp {args.command}: unexpected error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
