#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from graphene import Float, Int, ObjectType, String


class ComplexityEstimateType(ObjectType):
    estimator = String()
    khat = Float()
    density = Float()
    source_length = Int()
