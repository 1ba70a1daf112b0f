#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.flow import edmonds_karp

from ..models.bit_string import BitString
from ..models.kmap_graph import (
    START,
    Direction,
    KMapGraph,
    ObservationTrace,
    SurfaceMode,
    SurfacePoint,
)
from .avnmp_utility import write_csv
from .complexity import complexity_density
from .exceptions import DomainError, FormatError, StructureError

INFINITY = float("inf")
FORWARDER_ONES = 0.1

EdgeWeight = ObservationTrace | float | int | Fraction
PathMatrix = Dict[str, Dict[str, Fraction | float]]


def trace_density(
    tr: ObservationTrace, k: int, estimator: str = "entropy"
) -> List[float]:
    """
    Density of the first n IN/OUT pairs for n = 1..k.
    With operation bounds set, each prefix is clipped to [opstart, opend).
    """
    if tr.pairs == 0:
        raise DomainError(f"{tr.component}: trace holds no observation pairs")
    if not 1 <= k <= tr.pairs:
        raise DomainError(f"{tr.component}: k={k} outside 1..{tr.pairs}")

    densities: List[float] = []
    for n in range(1, k + 1):
        bits = tr.concatenated(n)
        if tr.opstart is not None:
            end = min(tr.opend, len(bits))
            if tr.opstart >= end:
                raise DomainError(
                    f"{tr.component}: first {n} pairs end before opstart {tr.opstart}"
                )
            bits = bits.slice(tr.opstart, end)
        densities.append(complexity_density(bits, estimator))
    return densities


def component_mean_density(tr: ObservationTrace, estimator: str = "entropy") -> float:
    return float(np.mean(trace_density(tr, tr.pairs, estimator)))


def _as_fraction(value: float | int | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float) and not math.isfinite(value):
        raise DomainError(f"density {value} is not finite")
    # Decimal text keeps 0.6 as 3/5 rather than its binary expansion.
    return Fraction(str(value)) if isinstance(value, float) else Fraction(value)


def build_kmap(
    layout: Mapping[str, Tuple[float, float]],
    edges: Iterable[Tuple[str, str, EdgeWeight]],
    start: str = START,
    estimator: str = "entropy",
    logger: logging.Logger | None = None,
) -> KMapGraph:
    logger = logger or logging.getLogger(__name__)
    graph = KMapGraph(
        positions={node: (float(x), float(y)) for node, (x, y) in layout.items()},
        start=start,
    )

    for u, v, weight in edges:
        if v == start:
            raise StructureError(f"edge {u}->{v} enters {start}")
        for node in (u, v):
            if node not in graph.positions:
                raise StructureError(f"edge {u}->{v} names node '{node}' missing from the layout")

        if isinstance(weight, ObservationTrace):
            weight = trace_density(weight, weight.pairs, estimator)[-1]
        density = _as_fraction(weight)
        if density <= 0:
            raise DomainError(f"edge {u}->{v} has non-positive density {weight}")

        if (u, v) in graph.densities:
            logger.warning(
                f"Duplicate K-Map edge {u}->{v}: {graph.densities[(u, v)]} replaced by {density}"
            )
        graph.densities[(u, v)] = density

    return graph


def min_complexity_paths(g: KMapGraph) -> PathMatrix:
    """All-pairs minimum summed density; unreachable pairs hold +inf."""
    distances = nx.floyd_warshall(g.to_networkx(), weight="density")
    return {
        u: {
            v: (Fraction(d) if math.isfinite(d) else INFINITY)
            for v, d in ((v, distances[u][v]) for v in g.nodes)
        }
        for u in g.nodes
    }


@dataclass(frozen=True)
class FlowResult:
    source: str
    sink: str
    value: Fraction
    flows: Dict[Tuple[str, str], Fraction]


def _integer_capacities(g: KMapGraph) -> Tuple[nx.DiGraph, int]:
    capacities = {(u, v): 1 / density for u, v, density in g.edges()}
    scale = math.lcm(*(c.denominator for c in capacities.values())) if capacities else 1

    graph = nx.DiGraph()
    graph.add_nodes_from(g.nodes)
    for (u, v), capacity in capacities.items():
        graph.add_edge(u, v, capacity=int(capacity * scale))
    return graph, scale


def insecurity_flow(g: KMapGraph, s: str, t: str) -> FlowResult:
    """
    Maximum s->t flow with capacity 1/density per edge.
    Capacities are scaled to integers by the common denominator so the result is exact.
    """
    for node in (s, t):
        if node not in g.positions:
            raise DomainError(f"no node '{node}' in the K-Map graph")
    if s == t:
        raise DomainError(f"source and sink are both '{s}'")

    graph, scale = _integer_capacities(g)
    value, flow_dict = nx.maximum_flow(graph, s, t, capacity="capacity", flow_func=edmonds_karp)
    return FlowResult(
        source=s,
        sink=t,
        value=Fraction(value, scale),
        flows={
            (u, v): Fraction(flow, scale)
            for u, targets in flow_dict.items()
            for v, flow in targets.items()
        },
    )


def pairwise_flows(g: KMapGraph) -> List[Tuple[str, str, Fraction]]:
    """Independent max-flow value for every ordered pair whose sink is not START."""
    reachable = min_complexity_paths(g)
    rows: List[Tuple[str, str, Fraction]] = []
    for u in g.nodes:
        for v in g.nodes:
            if u == v or v == g.start:
                continue
            if reachable[u][v] == INFINITY:
                rows.append((u, v, Fraction(0)))
            else:
                rows.append((u, v, insecurity_flow(g, u, v).value))
    return rows


def insecurity_levels(
    g: KMapGraph, flows: Sequence[Tuple[str, str, Fraction]] | None = None
) -> Dict[str, Fraction]:
    levels: Dict[str, Fraction] = {node: Fraction(0) for node in g.nodes}
    for u, v, value in flows if flows is not None else pairwise_flows(g):
        levels[u] += value
        levels[v] += value
    return levels


def export_surface(g: KMapGraph, mode: SurfaceMode) -> List[SurfacePoint]:
    if mode is SurfaceMode.PATH_HEIGHT:
        if g.start not in g.positions:
            raise DomainError(f"path heights need a '{g.start}' node")
        row = min_complexity_paths(g)[g.start]
        heights = {
            node: INFINITY if node == g.start else float(row[node]) for node in g.nodes
        }
    else:
        heights = {node: -float(level) for node, level in insecurity_levels(g).items()}

    return [
        SurfacePoint(node, *g.positions[node], heights[node]) for node in g.nodes
    ]


def synthesize_trace(
    kind: str,
    n: int,
    block_bytes: int,
    rng: np.random.Generator,
    component: str | None = None,
) -> ObservationTrace:
    """
    zero: echoes constant zero blocks.
    noise: adds seeded random noise to a random input.
    forwarder: passes a sparse low-entropy stream through unchanged.
    """
    if n < 1 or block_bytes < 1:
        raise DomainError(f"trace needs n >= 1 and block_bytes >= 1, got {n}, {block_bytes}")

    records: List[Tuple[Direction, BitString]] = []
    for _ in range(n):
        if kind == "zero":
            inbound = outbound = BitString.from_bytes(bytes(block_bytes))
        elif kind == "noise":
            data = rng.integers(0, 256, size=block_bytes, dtype=np.uint16)
            noise = rng.integers(0, 256, size=block_bytes, dtype=np.uint16)
            inbound = BitString.from_bytes(data.astype(np.uint8).tobytes())
            outbound = BitString.from_bytes(((data + noise) % 256).astype(np.uint8).tobytes())
        elif kind == "forwarder":
            sparse = (rng.random(block_bytes * 8) < FORWARDER_ONES).astype(np.uint8)
            inbound = outbound = BitString.from_array(sparse)
        else:
            raise DomainError(f"unknown component kind '{kind}' (zero, noise, forwarder)")
        records.extend(((Direction.IN, inbound), (Direction.OUT, outbound)))

    return ObservationTrace(component or kind, tuple(records))


def component_trace(
    kind: str, component: str, seed: int = 0, n: int = 16, block_bytes: int = 64
) -> ObservationTrace:
    """Synthetic trace of a named component, fixed by (seed, component, kind)."""
    rng = np.random.default_rng([seed, *component.encode("utf-8")])
    return synthesize_trace(kind, n, block_bytes, rng, component=component)


def read_trace_file(path: str | Path, component: str | None = None) -> ObservationTrace:
    """One `IN <hex>` or `OUT <hex>` record per line; '#' starts a comment."""
    path = Path(path)
    records: List[Tuple[Direction, BitString]] = []
    with path.open(encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                flag, payload = line.split(maxsplit=1)
                records.append((Direction(flag.upper()), BitString.from_hex(payload)))
            except ValueError as e:
                raise FormatError(f"{path}:{number}: {e}") from None

    try:
        return ObservationTrace(component or path.stem, tuple(records))
    except DomainError as e:
        raise FormatError(f"{path}: {e}") from None


def write_trace_file(path: str | Path, tr: ObservationTrace) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for direction, bits in tr.records:
            if len(bits) % 8:
                raise FormatError(f"{tr.component}: {len(bits)}-bit record is not whole bytes")
            handle.write(f"{direction.value} {bits.to_bytes().hex()}\n")
    return path


def write_path_matrix(path: str | Path, g: KMapGraph, matrix: PathMatrix) -> Path:
    return write_csv(
        path,
        ("node", *g.nodes),
        ((u, *(float(matrix[u][v]) for v in g.nodes)) for u in g.nodes),
    )


def write_flows(path: str | Path, flows: Iterable[Tuple[str, str, Fraction]]) -> Path:
    return write_csv(path, ("source", "sink", "flow"), ((u, v, float(f)) for u, v, f in flows))


def write_edge_flows(path: str | Path, result: FlowResult) -> Path:
    return write_csv(
        path,
        ("u", "v", "flow"),
        ((u, v, float(f)) for (u, v), f in sorted(result.flows.items()) if f),
    )


def write_levels(path: str | Path, levels: Mapping[str, Fraction]) -> Path:
    return write_csv(path, ("node", "level"), ((n, float(level)) for n, level in levels.items()))


def write_surface(path: str | Path, points: Iterable[SurfacePoint]) -> Path:
    return write_csv(path, ("node", "x", "y", "height"), ((p.node, p.x, p.y, p.height) for p in points))
