#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from graphene import Boolean, Int, List, ObjectType


class HypothesisScoreType(ObjectType):
    w = Int()
    summed_abs_error = Int()
    description_length = Int()
    selected = Boolean()


class HypothesisSelectionType(ObjectType):
    selected_w = Int()
    description_length = Int()
    passive_length = Int()
    scores = List(HypothesisScoreType)
