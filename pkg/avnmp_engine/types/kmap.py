#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from graphene import Float, List, ObjectType, String


class NodeLevelType(ObjectType):
    node = String()
    level = Float()
    path_height = String()


class KMapLevelsType(ObjectType):
    start = String()
    levels = List(NodeLevelType)
