#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Any, Dict

from graphene import ResolveInfo

from ..handlers.mdl import hypothesis_sweep, passive_length
from ..models.hypothesis import TimedSample
from ..types.hypothesis import HypothesisScoreType, HypothesisSelectionType

DEFAULT_GRID = (1, 2, 4, 8, 16, 32)


def resolve_hypothesis_selection(
    info: ResolveInfo, **kwargs: Dict[str, Any]
) -> HypothesisSelectionType:
    step_size = kwargs.get("step_size") or 1.0
    data = [
        TimedSample(index * step_size, value)
        for index, value in enumerate(kwargs["values"])
    ]
    scores = hypothesis_sweep(kwargs.get("grid") or DEFAULT_GRID, data, step_size)
    selected = next(score for score in scores if score.selected)
    return HypothesisSelectionType(
        selected_w=selected.w,
        description_length=selected.description_length,
        passive_length=passive_length(data),
        scores=[
            HypothesisScoreType(
                w=score.w,
                summed_abs_error=score.summed_abs_error,
                description_length=score.description_length,
                selected=score.selected,
            )
            for score in scores
        ],
    )
