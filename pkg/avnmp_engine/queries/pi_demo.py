#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Any, Dict

from graphene import ResolveInfo

from ..handlers.anet import PI_DEFAULT_PRECISION, pi_scenario, transmit
from ..types.pi_demo import LinkLoadType, PiDemoType


def resolve_pi_demo(info: ResolveInfo, **kwargs: Dict[str, Any]) -> PiDemoType:
    precision = kwargs.get("precision") or PI_DEFAULT_PRECISION
    topo, routes, packets = pi_scenario(precision)
    report = transmit(topo, routes, packets)
    return PiDemoType(
        precision=precision,
        algorithmic_bytes=packets[0].size_bytes,
        static_bytes=packets[1].size_bytes,
        link_loads=[
            LinkLoadType(
                link_id=usage.link_id,
                packet=packets[usage.packet_index].mode.value,
                load_bytes=usage.load_bytes,
                transit_s=float(usage.transit_s),
            )
            for usage in report.usages
        ],
    )
