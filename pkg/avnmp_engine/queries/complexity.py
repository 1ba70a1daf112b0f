#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Any, Dict

from graphene import ResolveInfo

from ..handlers.complexity import estimate_complexity
from ..handlers.exceptions import DomainError
from ..models.bit_string import BitString
from ..types.complexity import ComplexityEstimateType


def resolve_complexity_estimate(
    info: ResolveInfo, **kwargs: Dict[str, Any]
) -> ComplexityEstimateType:
    bits, hex_text = kwargs.get("bits"), kwargs.get("hex")
    if (bits is None) == (hex_text is None):
        raise DomainError("pass exactly one of bits or hex")

    x = BitString(bits) if bits is not None else BitString.from_hex(hex_text)
    estimator = kwargs.get("estimator") or "entropy"
    estimate = estimate_complexity(x, estimator)
    return ComplexityEstimateType(
        estimator=estimator,
        khat=estimate.khat,
        density=estimate.density,
        source_length=estimate.source_length,
    )
