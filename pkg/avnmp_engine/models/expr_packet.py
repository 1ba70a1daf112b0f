#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Tuple, Union

from ..handlers.exceptions import ConfigurationError


class ExprMode(str, Enum):
    ALGORITHMIC = "ALGORITHMIC"
    STATIC = "STATIC"


@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class Arg:
    index: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Digits:
    expr: "Expr"
    n: int


Expr = Union[Literal, Arg, BinOp, Digits]


@dataclass(frozen=True)
class ExprPacket:
    mode: ExprMode
    code: Expr | None = None
    args: Tuple[float, ...] = ()
    payload: str = ""
    code_bytes: bytes = b""

    def __post_init__(self) -> None:
        if self.mode is ExprMode.ALGORITHMIC and (self.payload or self.code is None):
            raise ConfigurationError("algorithmic packets carry code and no payload")
        if self.mode is ExprMode.STATIC and (self.code is not None or self.args):
            raise ConfigurationError("static packets carry a payload and no code")

    @property
    def size_bytes(self) -> int:
        # Algorithmic: arg count byte, 8 bytes per arg, then the opcode stream.
        if self.mode is ExprMode.STATIC:
            return len(self.payload.encode("ascii"))
        return 1 + 8 * len(self.args) + len(self.code_bytes)


@dataclass(frozen=True)
class Node:
    node_id: str
    processing_rate: float = 1_000_000.0


@dataclass(frozen=True)
class Link:
    link_id: int
    endpoints: Tuple[str, str]
    capacity: float


@dataclass
class Topology:
    nodes: Dict[str, Node] = field(default_factory=dict)
    links: Dict[int, Link] = field(default_factory=dict)

    def add_node(self, node_id: str, processing_rate: float = 1_000_000.0) -> Node:
        if not processing_rate > 0:
            raise ConfigurationError(f"node {node_id}: processing rate must be positive")
        self.nodes[node_id] = Node(node_id, processing_rate)
        return self.nodes[node_id]

    def add_link(self, link_id: int, a: str, b: str, capacity: float) -> Link:
        if link_id in self.links:
            raise ConfigurationError(f"duplicate link id {link_id}")
        if not capacity > 0:
            raise ConfigurationError(f"link {link_id}: capacity must be positive")
        for endpoint in (a, b):
            if endpoint not in self.nodes:
                self.add_node(endpoint)
        self.links[link_id] = Link(link_id, (a, b), capacity)
        return self.links[link_id]

    def link(self, link_id: int) -> Link:
        try:
            return self.links[link_id]
        except KeyError:
            raise ConfigurationError(f"unknown link id {link_id}") from None


@dataclass(frozen=True)
class LinkUsage:
    packet_index: int
    link_id: int
    load_bytes: int
    transit_s: Fraction


@dataclass
class TransmissionReport:
    usages: list[LinkUsage] = field(default_factory=list)
    link_load: Dict[int, int] = field(default_factory=dict)
    link_transit: Dict[int, Fraction] = field(default_factory=dict)
    node_processing: Dict[str, Fraction] = field(default_factory=dict)

    def load_for(self, packet_index: int) -> Dict[int, int]:
        return {
            usage.link_id: usage.load_bytes
            for usage in self.usages
            if usage.packet_index == packet_index
        }
