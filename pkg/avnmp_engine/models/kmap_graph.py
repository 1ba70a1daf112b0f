#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from ..handlers.exceptions import DomainError, StructureError
from .bit_string import BitString

START = "START"


class Direction(str, Enum):
    IN = "IN"
    OUT = "OUT"


class SurfaceMode(str, Enum):
    PATH_HEIGHT = "PATH_HEIGHT"
    FLOW_LEVEL = "FLOW_LEVEL"


@dataclass(frozen=True)
class ObservationTrace:
    """
    I/O observations of one component: IN, OUT, IN, OUT ...
    opstart/opend optionally bound the bits an operation occupies.
    """

    component: str
    records: Tuple[Tuple[Direction, BitString], ...]
    opstart: Optional[int] = None
    opend: Optional[int] = None

    def __post_init__(self) -> None:
        for index, (direction, _) in enumerate(self.records):
            expected = Direction.IN if index % 2 == 0 else Direction.OUT
            if direction is not expected:
                raise DomainError(
                    f"{self.component}: record {index} is {direction.value}, expected {expected.value}"
                )

        if (self.opstart is None) != (self.opend is None):
            raise DomainError(f"{self.component}: opstart and opend come together")
        if self.opstart is not None and not 0 <= self.opstart < self.opend <= self.total_bits:
            raise DomainError(
                f"{self.component}: bounds [{self.opstart}, {self.opend}) "
                f"outside {self.total_bits} bits"
            )

    @property
    def pairs(self) -> int:
        return len(self.records) // 2

    @property
    def total_bits(self) -> int:
        return sum(len(bits) for _, bits in self.records)

    def concatenated(self, n: int) -> BitString:
        """IN/OUT bits of the first n observation pairs, in order."""
        return BitString.concat(bits for _, bits in self.records[: 2 * n])


@dataclass(frozen=True)
class SurfacePoint:
    node: str
    x: float
    y: float
    height: float


@dataclass
class KMapGraph:
    positions: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    densities: Dict[Tuple[str, str], Fraction] = field(default_factory=dict)
    start: str = START

    @property
    def nodes(self) -> List[str]:
        return list(self.positions)

    def edges(self) -> Iterator[Tuple[str, str, Fraction]]:
        for (u, v), density in self.densities.items():
            yield u, v, density

    def validate(self) -> None:
        for u, v, density in self.edges():
            if v == self.start:
                raise StructureError(f"edge {u}->{v} enters {self.start}")
            if not density > 0:
                raise DomainError(f"edge {u}->{v} has non-positive density {density}")
            for node in (u, v):
                if node not in self.positions:
                    raise StructureError(f"edge {u}->{v} names unknown node '{node}'")

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.positions)
        for u, v, density in self.edges():
            graph.add_edge(u, v, density=density, capacity=1 / density)
        return graph

    def scaled(self, factor: Fraction) -> "KMapGraph":
        return KMapGraph(
            positions=dict(self.positions),
            densities={edge: density * factor for edge, density in self.densities.items()},
            start=self.start,
        )
