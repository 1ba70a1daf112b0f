#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Any, Dict

import pendulum
from graphene import Field, Float, Int, List, ObjectType, ResolveInfo, String

from ..queries.complexity import resolve_complexity_estimate
from ..queries.hypothesis import resolve_hypothesis_selection
from ..queries.kmap import resolve_kmap_levels
from ..queries.pi_demo import resolve_pi_demo
from ..types.complexity import ComplexityEstimateType
from ..types.hypothesis import HypothesisScoreType, HypothesisSelectionType
from ..types.kmap import KMapLevelsType, NodeLevelType
from ..types.pi_demo import LinkLoadType, PiDemoType


def type_class():
    return [
        ComplexityEstimateType,
        HypothesisScoreType,
        HypothesisSelectionType,
        LinkLoadType,
        PiDemoType,
        NodeLevelType,
        KMapLevelsType,
    ]


class Query(ObjectType):
    ping = String()

    complexity_estimate = Field(
        ComplexityEstimateType,
        bits=String(required=False),
        hex=String(required=False),
        estimator=String(required=False),
    )

    hypothesis_selection = Field(
        HypothesisSelectionType,
        values=List(Float, required=True),
        step_size=Float(required=False),
        grid=List(Int, required=False),
    )

    pi_demo = Field(
        PiDemoType,
        precision=Int(required=False),
    )

    kmap_levels = Field(
        KMapLevelsType,
        graph_path=String(required=True),
    )

    def resolve_ping(self, info: ResolveInfo) -> str:
        return f"Hello at {pendulum.now('UTC').to_time_string()}!!"

    def resolve_complexity_estimate(
        self, info: ResolveInfo, **kwargs: Dict[str, Any]
    ) -> ComplexityEstimateType:
        return resolve_complexity_estimate(info, **kwargs)

    def resolve_hypothesis_selection(
        self, info: ResolveInfo, **kwargs: Dict[str, Any]
    ) -> HypothesisSelectionType:
        return resolve_hypothesis_selection(info, **kwargs)

    def resolve_pi_demo(self, info: ResolveInfo, **kwargs: Dict[str, Any]) -> PiDemoType:
        return resolve_pi_demo(info, **kwargs)

    def resolve_kmap_levels(
        self, info: ResolveInfo, **kwargs: Dict[str, Any]
    ) -> KMapLevelsType:
        return resolve_kmap_levels(info, **kwargs)
