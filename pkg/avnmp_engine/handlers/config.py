#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import configparser
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Tuple

import pydantic

from ..models.expr_packet import Topology
from ..models.kmap_graph import START, KMapGraph
from ..models.scenario import ScenarioConfig
from .exceptions import AVNMPError, ConfigurationError, FormatError

# INI section -> {key: ScenarioConfig field}; keys not listed map onto themselves.
SCENARIO_SECTIONS: Dict[str, Dict[str, str]] = {
    "window": {"lambda": "sliding_window"},
    "tolerance": {
        "start": "tolerance_start",
        "factor": "tolerance_factor",
        "interval": "tolerance_interval",
    },
    "hypothesis": {"w": "smoothing_window", "ratio": "virtual_real_ratio"},
    "topology": {"latency": "link_latency", "observed": "observed_node"},
    "workload": {"kind": "workload"},
    "seed": {"value": "seed"},
    "engine": {},
}
_PREFIXED = {"tolerance": "tolerance_", "workload": "workload_"}


def _reader(path: Path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as e:
        raise ConfigurationError(f"cannot read {path}: {e.strerror or e}") from None
    except configparser.Error as e:
        raise FormatError(f"{path}: {e.message}") from None
    return parser


def _field_name(section: str, key: str) -> str:
    aliases = SCENARIO_SECTIONS[section]
    if key in aliases:
        return aliases[key]
    prefix = _PREFIXED.get(section, "")
    if prefix and not key.startswith(prefix):
        return prefix + key
    return key


def _scenario_fields(parser: configparser.ConfigParser, path: Path) -> Dict[str, Any]:
    fields: Dict[str, Any] = {}
    for section in parser.sections():
        if section not in SCENARIO_SECTIONS:
            raise ConfigurationError(
                f"{path}: unknown section [{section}] "
                f"(expected {', '.join(sorted(SCENARIO_SECTIONS))})"
            )
        for key, value in parser.items(section):
            fields[_field_name(section, key.lower())] = value
    return fields


def _override_field(key: str) -> str:
    if "." not in key:
        return key
    section, name = key.split(".", 1)
    if section not in SCENARIO_SECTIONS:
        raise ConfigurationError(f"override '{key}' names unknown section [{section}]")
    return _field_name(section, name)


class Config:
    """
    Centralized Configuration Class
    Holds run-wide settings and loads scenario, topology and K-Map files.
    """

    setting: Dict[str, Any] = {}
    logger: logging.Logger | None = None

    log_level: str = "INFO"
    out_dir: str = "./out"
    seed: int = 0
    sample_width: int = 32
    estimator: str = "entropy"

    @classmethod
    def initialize(cls, logger: logging.Logger, **setting: Dict[str, Any]) -> None:
        """
        Initialize configuration setting.
        Args:
            logger (logging.Logger): Logger instance for logging.
            **setting (Dict[str, Any]): Configuration dictionary; missing keys fall
                back to AVNMP_* environment variables, then to defaults.
        """
        try:
            cls.logger = logger
            cls.setting = setting
            cls._set_parameters(setting)
            logger.info("Configuration initialized successfully.")
        except Exception:
            logger.exception("Failed to initialize configuration.")
            raise

    @classmethod
    def _set_parameters(cls, setting: Dict[str, Any]) -> None:
        def pick(key: str, default: str) -> Any:
            value = setting.get(key)
            return value if value is not None else os.getenv(f"AVNMP_{key.upper()}", default)

        cls.log_level = str(pick("log_level", "INFO")).upper()
        cls.out_dir = str(pick("out_dir", "./out"))
        cls.estimator = str(pick("estimator", "entropy"))
        try:
            cls.seed = int(pick("seed", "0"))
            cls.sample_width = int(pick("sample_width", "32"))
        except ValueError as e:
            raise ConfigurationError(f"bad numeric setting: {e}") from None

        if not 0 <= cls.seed < 1 << 64:
            raise ConfigurationError(f"seed {cls.seed} is not an unsigned 64-bit value")
        if not 2 <= cls.sample_width <= 64:
            raise ConfigurationError(f"sample width {cls.sample_width} outside 2..64")

    @classmethod
    def load_scenario(cls, path: str | Path | None = None, **overrides: Any) -> ScenarioConfig:
        """
        Parse an INI scenario into a validated ScenarioConfig.
        Overrides use `section.key` or the flat field name and win over the file.
        """
        fields: Dict[str, Any] = {"seed": cls.seed}
        base = Path.cwd()
        if path is not None:
            path = Path(path)
            base = path.parent
            fields.update(_scenario_fields(_reader(path), path))

        for key, value in overrides.items():
            fields[_override_field(key)] = value

        trace = fields.get("workload_trace")
        if trace and not Path(trace).is_absolute():
            fields["workload_trace"] = str(base / trace)

        try:
            scenario = ScenarioConfig(**fields)
        except pydantic.ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in error['loc']) or 'scenario'}: {error['msg']}"
                for error in e.errors()
            )
            raise ConfigurationError(f"{path or 'scenario'}: {problems}") from None

        if cls.logger:
            cls.logger.info(
                f"Scenario loaded: {scenario.nodes} nodes, window {scenario.sliding_window}s, "
                f"duration {scenario.duration}s, seed {scenario.seed}"
            )
        return scenario

    @classmethod
    def load_topology(cls, path: str | Path) -> Tuple[Topology, List[Tuple[int, ...]]]:
        """
        [nodes]  n0 = <processing rate ops/s>
        [links]  <id> = <a> <b> <capacity bytes/s>
        [routes] <name> = <link id> <link id> ...
        """
        path = Path(path)
        parser = _reader(path)
        topology = Topology()
        try:
            if parser.has_section("nodes"):
                for node_id, rate in parser.items("nodes"):
                    if rate:
                        topology.add_node(node_id, float(rate))
                    else:
                        topology.add_node(node_id)
            for link_id, value in parser.items("links"):
                a, b, capacity = value.split()
                topology.add_link(int(link_id), a, b, float(capacity))
            routes = [
                tuple(int(link) for link in value.split())
                for _, value in (parser.items("routes") if parser.has_section("routes") else ())
            ]
        except configparser.NoSectionError:
            raise FormatError(f"{path}: missing [links] section") from None
        except ValueError as e:
            if isinstance(e, AVNMPError):
                raise
            raise FormatError(f"{path}: {e}") from None
        return topology, routes

    @classmethod
    def load_kmap_spec(cls, path: str | Path) -> KMapGraph:
        """
        [kmap]   start = START, estimator = entropy,
                 seed = 0, observations = 16, block_bytes = 64 (all optional)
        [nodes]  <id> = <x>, <y>
        [edges]  <u> -> <v> = <density> | trace:<file> | synth:<zero|noise|forwarder>

        A trace or synth weight observes v, the component the edge enters;
        every synth edge into v shares one trace.
        """
        from .kmap import build_kmap, component_trace, read_trace_file

        path = Path(path)
        parser = _reader(path)
        for section in ("nodes", "edges"):
            if not parser.has_section(section):
                raise FormatError(f"{path}: missing [{section}] section")

        start = parser.get("kmap", "start", fallback=START)
        estimator = parser.get("kmap", "estimator", fallback=cls.estimator)
        synthesized: Dict[Tuple[str, str], Any] = {}

        try:
            seed = parser.getint("kmap", "seed", fallback=0)
            observations = parser.getint("kmap", "observations", fallback=16)
            block_bytes = parser.getint("kmap", "block_bytes", fallback=64)
            if seed < 0:
                raise FormatError(f"{path}: [kmap] seed must not be negative")

            layout = {}
            for node, position in parser.items("nodes"):
                x, y = (float(part) for part in position.replace(",", " ").split())
                layout[node] = (x, y)

            edges = []
            for key, value in parser.items("edges"):
                u, separator, v = key.partition("->")
                if not separator or not u.strip() or not v.strip():
                    raise FormatError(f"{path}: edge key '{key}' is not 'u -> v'")
                if value.startswith("trace:"):
                    reference = Path(value[len("trace:") :].strip())
                    weight = read_trace_file(
                        reference if reference.is_absolute() else path.parent / reference,
                        component=v.strip(),
                    )
                elif value.startswith("synth:"):
                    key = (v.strip(), value[len("synth:") :].strip())
                    if key not in synthesized:
                        synthesized[key] = component_trace(
                            key[1], key[0], seed, observations, block_bytes
                        )
                    weight = synthesized[key]
                else:
                    weight = float(value)
                edges.append((u.strip(), v.strip(), weight))
        except ValueError as e:
            if isinstance(e, AVNMPError):
                raise
            raise FormatError(f"{path}: {e}") from None
        except OSError as e:
            raise ConfigurationError(f"{path}: cannot read trace: {e.strerror or e}") from None

        return build_kmap(layout, edges, start=start, estimator=estimator, logger=cls.logger)
