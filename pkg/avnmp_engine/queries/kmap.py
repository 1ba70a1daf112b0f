#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Any, Dict

from graphene import ResolveInfo

from ..handlers.avnmp_utility import format_number
from ..handlers.config import Config
from ..handlers.kmap import INFINITY, insecurity_levels, min_complexity_paths
from ..types.kmap import KMapLevelsType, NodeLevelType


def resolve_kmap_levels(info: ResolveInfo, **kwargs: Dict[str, Any]) -> KMapLevelsType:
    graph = Config.load_kmap_spec(kwargs["graph_path"])
    levels = insecurity_levels(graph)

    heights: Dict[str, float] = {}
    if graph.start in graph.positions:
        heights = {
            node: float(cost)
            for node, cost in min_complexity_paths(graph)[graph.start].items()
            if node != graph.start
        }

    return KMapLevelsType(
        start=graph.start,
        levels=[
            NodeLevelType(
                node=node,
                level=float(level),
                path_height=str(format_number(heights.get(node, INFINITY))),
            )
            for node, level in sorted(levels.items(), key=lambda item: (-item[1], item[0]))
        ],
    )
