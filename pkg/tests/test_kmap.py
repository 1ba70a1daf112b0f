#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import itertools
import logging
import math
from fractions import Fraction

import pytest

from avnmp_engine.handlers.exceptions import DomainError, FormatError, StructureError
from avnmp_engine.handlers.kmap import (
    INFINITY,
    build_kmap,
    component_mean_density,
    component_trace,
    export_surface,
    insecurity_flow,
    insecurity_levels,
    min_complexity_paths,
    pairwise_flows,
    read_trace_file,
    synthesize_trace,
    trace_density,
    write_trace_file,
)
from avnmp_engine.models.bit_string import BitString
from avnmp_engine.models.kmap_graph import START, Direction, ObservationTrace, SurfaceMode

F = Fraction


@pytest.fixture
def sut(config, scenarios_dir):
    return config.load_kmap_spec(scenarios_dir / "system_under_attack.ini")


@pytest.fixture
def weighted():
    layout = {START: (0, 0), "A": (-1, 1), "B": (1, 1), "C": (2, 0), "D": (-1, -1), "E": (1, -1)}
    edges = [
        (START, "A", 0.6),
        (START, "B", 0.9),
        (START, "D", 0.7),
        (START, "E", 0.1),
        ("B", "C", 0.05),
        ("E", "C", 0.02),
        ("A", "B", 0.5),
        ("D", "E", 0.4),
    ]
    return build_kmap(layout, edges)


def random_graph(rng, size):
    nodes = [START] + [f"n{i}" for i in range(1, size)]
    layout = {node: (float(i), 0.0) for i, node in enumerate(nodes)}
    edges = [
        (u, v, F(int(rng.integers(1, 10)), int(rng.integers(1, 10))))
        for u, v in itertools.permutations(nodes, 2)
        if v != START and rng.random() < 0.5
    ]
    return build_kmap(layout, edges)


def brute_force_path(g, u, v):
    if u == v:
        return F(0)
    others = [n for n in g.nodes if n not in (u, v)]
    best = INFINITY
    for size in range(len(others) + 1):
        for middle in itertools.permutations(others, size):
            route = (u, *middle, v)
            hops = list(zip(route, route[1:]))
            if all(hop in g.densities for hop in hops):
                best = min(best, sum(g.densities[hop] for hop in hops))
    return best


def brute_force_cut(g, s, t):
    others = [n for n in g.nodes if n not in (s, t)]
    best = None
    for size in range(len(others) + 1):
        for extra in itertools.combinations(others, size):
            side = {s, *extra}
            cut = sum(
                (1 / density for (u, v), density in g.densities.items() if u in side and v not in side),
                F(0),
            )
            best = cut if best is None else min(best, cut)
    return best


def test_random_graphs_match_brute_force(rng):
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(2, 6)))
        paths = min_complexity_paths(g)
        for u, v in itertools.product(g.nodes, repeat=2):
            assert paths[u][v] == brute_force_path(g, u, v)

        for s, t, value in pairwise_flows(g):
            assert t != START
            assert value == brute_force_cut(g, s, t)


def test_min_paths_obey_the_triangle_inequality(sut):
    paths = min_complexity_paths(sut)
    for u, v, w in itertools.product(sut.nodes, repeat=3):
        assert paths[u][w] <= paths[u][v] + paths[v][w]


def test_hand_weighted_paths_and_levels(weighted):
    paths = min_complexity_paths(weighted)
    assert paths[START] == {
        START: 0,
        "A": F(3, 5),
        "B": F(9, 10),
        "C": F(3, 25),
        "D": F(7, 10),
        "E": F(1, 10),
    }
    assert paths["C"][START] == INFINITY

    levels = insecurity_levels(weighted)
    assert levels == {
        START: F(1985, 63),
        "A": F(5, 3) + 4,
        "B": F(25, 9) + 22,
        "C": F(895, 63) + F(149, 2),
        "D": F(10, 7) + 5,
        "E": F(80, 7) + F(105, 2),
    }


def test_system_under_attack_weights_come_from_component_traces(sut):
    d = sut.densities
    # Every edge into a component carries that component's density.
    assert d[(START, "B")] == d[("A", "B")]
    assert d[(START, "E")] == d[("D", "E")]
    assert d[("B", "C")] == d[("E", "C")] == F(7, 8192)

    for node in ("A", "B", "D"):
        assert float(d[(START, node)]) == pytest.approx(1.0, abs=0.05)
    assert 0.4 < float(d[(START, "E")]) < 0.6


def test_system_under_attack_paths_and_levels(sut):
    paths = min_complexity_paths(sut)
    assert paths[START][START] == 0
    assert paths["C"][START] == INFINITY
    assert paths[START]["C"] == paths[START]["E"] + sut.densities[("E", "C")]

    levels = insecurity_levels(sut)
    ranking = sorted(levels, key=levels.get, reverse=True)
    assert ranking[:3] == ["C", "E", "B"]
    assert levels["C"] > 2 * levels["B"]


def test_system_under_attack_surfaces(sut):
    heights = {p.node: p.height for p in export_surface(sut, SurfaceMode.PATH_HEIGHT)}
    assert heights[START] == math.inf
    assert min(heights, key=heights.get) == "E"
    assert all(math.isfinite(height) for node, height in heights.items() if node != START)

    points = export_surface(sut, SurfaceMode.FLOW_LEVEL)
    assert [(p.x, p.y) for p in points if p.node == "C"] == [(2.0, 0.0)]
    assert min(points, key=lambda p: p.height).node == "C"


@pytest.mark.parametrize("graph", ["weighted", "sut"])
def test_flow_is_conserved(graph, request):
    g = request.getfixturevalue(graph)
    result = insecurity_flow(g, START, "C")
    if graph == "weighted":
        assert result.value == F(895, 63)
    for node in g.nodes:
        inflow = sum((f for (u, v), f in result.flows.items() if v == node), F(0))
        outflow = sum((f for (u, v), f in result.flows.items() if u == node), F(0))
        if node == START:
            assert outflow - inflow == result.value
        elif node == "C":
            assert inflow - outflow == result.value
        else:
            assert inflow == outflow
    for (u, v), f in result.flows.items():
        assert 0 <= f <= 1 / g.densities[(u, v)]


def test_scaling_densities_scales_paths_and_flows(weighted):
    doubled = weighted.scaled(F(2))
    paths, scaled_paths = min_complexity_paths(weighted), min_complexity_paths(doubled)
    for u, v in itertools.product(weighted.nodes, repeat=2):
        assert scaled_paths[u][v] == 2 * paths[u][v]
    for (s, t, value), (_, _, scaled) in zip(pairwise_flows(weighted), pairwise_flows(doubled)):
        assert scaled == value / 2


def test_flow_endpoints_are_checked(sut):
    with pytest.raises(DomainError):
        insecurity_flow(sut, START, START)
    with pytest.raises(DomainError):
        insecurity_flow(sut, START, "Z")


def test_build_kmap_rejects_bad_edges():
    layout = {START: (0, 0), "A": (1, 0)}
    with pytest.raises(StructureError):
        build_kmap(layout, [("A", START, 0.5)])
    with pytest.raises(StructureError):
        build_kmap(layout, [(START, "Q", 0.5)])
    with pytest.raises(DomainError):
        build_kmap(layout, [(START, "A", 0)])
    with pytest.raises(DomainError):
        build_kmap(layout, [(START, "A", float("nan"))])


def test_duplicate_edge_keeps_the_last_density(logger, caplog):
    layout = {START: (0, 0), "A": (1, 0)}
    with caplog.at_level(logging.WARNING):
        g = build_kmap(layout, [(START, "A", 0.5), (START, "A", 0.25)], logger=logger)
    assert g.densities == {(START, "A"): F(1, 4)}
    assert "Duplicate K-Map edge" in caplog.text


def test_path_height_needs_start():
    g = build_kmap({"A": (0, 0), "B": (1, 0)}, [("A", "B", 0.5)])
    with pytest.raises(DomainError):
        export_surface(g, SurfaceMode.PATH_HEIGHT)
    levels = {p.node: p.height for p in export_surface(g, SurfaceMode.FLOW_LEVEL)}
    assert levels == {"A": -2.0, "B": -2.0}


def test_zero_component_density_falls(rng):
    densities = trace_density(synthesize_trace("zero", 8, 16, rng), 8)
    assert all(later < earlier for earlier, later in zip(densities, densities[1:]))


def test_noise_and_forwarder_components(rng):
    noise = trace_density(synthesize_trace("noise", 6, 64, rng), 6)
    forwarder = trace_density(synthesize_trace("forwarder", 6, 64, rng), 6)
    assert noise == pytest.approx([1.0] * 6, abs=0.05)
    assert all(f < n for f, n in zip(forwarder[3:], noise[3:]))
    assert component_mean_density(synthesize_trace("noise", 4, 64, rng)) > 0.9


def test_unknown_component_kind(rng):
    with pytest.raises(DomainError):
        synthesize_trace("amplifier", 2, 4, rng)


def test_trace_density_bounds():
    ones = BitString.from_bytes(b"\xff")
    records = ((Direction.IN, ones), (Direction.OUT, ones)) * 2
    trace = ObservationTrace("c", records, opstart=4, opend=20)
    # A constant string costs only its length: log2(n) / n.
    assert trace_density(trace, 2) == pytest.approx([math.log2(12) / 12, 4 / 16])
    with pytest.raises(DomainError):
        trace_density(trace, 3)

    late = ObservationTrace("c", records, opstart=20, opend=30)
    with pytest.raises(DomainError):
        trace_density(late, 1)

    with pytest.raises(DomainError):
        ObservationTrace("c", ((Direction.OUT, ones),))
    with pytest.raises(DomainError):
        ObservationTrace("c", ((Direction.IN, ones),), opstart=1)


def test_trace_file_roundtrip(tmp_path, rng):
    trace = synthesize_trace("noise", 3, 8, rng, component="B")
    path = write_trace_file(tmp_path / "b.trace", trace)
    assert read_trace_file(path, component="B") == trace
    assert read_trace_file(path).component == "b"


@pytest.mark.parametrize(
    "text",
    ["IN zz\n", "SIDEWAYS 00\n", "OUT 00\n", "IN\n"],
)
def test_bad_trace_files(tmp_path, text):
    path = tmp_path / "bad.trace"
    path.write_text(text)
    with pytest.raises(FormatError):
        read_trace_file(path)


def test_kmap_spec_with_trace_edges(config, tmp_path, rng):
    write_trace_file(tmp_path / "traces" / "a.trace", synthesize_trace("noise", 2, 16, rng))
    spec = tmp_path / "graph.ini"
    spec.write_text(
        "[nodes]\nSTART = 0, 0\nA = 1, 0\nB = 2, 0\n"
        "[edges]\nSTART -> A = 0.5\nA -> B = trace:traces/a.trace\n"
    )
    g = config.load_kmap_spec(spec)
    assert g.densities[(START, "A")] == F(1, 2)
    assert g.densities[("A", "B")] > F(9, 10)


def test_kmap_spec_needs_edges(config, tmp_path):
    spec = tmp_path / "graph.ini"
    spec.write_text("[nodes]\nSTART = 0, 0\n")
    with pytest.raises(FormatError):
        config.load_kmap_spec(spec)


def write_synth_spec(path, seed, kind="noise"):
    path.write_text(
        f"[kmap]\nseed = {seed}\nobservations = 4\nblock_bytes = 16\n"
        "[nodes]\nSTART = 0, 0\nA = 1, 0\nB = 2, 0\n"
        f"[edges]\nSTART -> A = synth:{kind}\nSTART -> B = synth:noise\nA -> B = synth:noise\n"
    )
    return path


def test_kmap_spec_with_synthesized_components(config, tmp_path):
    first = config.load_kmap_spec(write_synth_spec(tmp_path / "a.ini", 5))
    again = config.load_kmap_spec(write_synth_spec(tmp_path / "b.ini", 5))

    assert first.densities == again.densities
    assert first.densities[(START, "B")] == first.densities[("A", "B")]

    trace = component_trace("noise", "B", seed=5, n=4, block_bytes=16)
    assert float(first.densities[("A", "B")]) == pytest.approx(trace_density(trace, trace.pairs)[-1])
    assert trace.records != component_trace("noise", "B", seed=6, n=4, block_bytes=16).records


def test_kmap_spec_rejects_bad_synth_settings(config, tmp_path):
    with pytest.raises(DomainError):
        config.load_kmap_spec(write_synth_spec(tmp_path / "kind.ini", 5, kind="amplifier"))
    with pytest.raises(FormatError):
        config.load_kmap_spec(write_synth_spec(tmp_path / "seed.ini", -1))
