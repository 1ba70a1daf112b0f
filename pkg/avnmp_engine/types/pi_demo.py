#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from graphene import Float, Int, List, ObjectType, String


class LinkLoadType(ObjectType):
    link_id = Int()
    packet = String()
    load_bytes = Int()
    transit_s = Float()


class PiDemoType(ObjectType):
    precision = Int()
    algorithmic_bytes = Int()
    static_bytes = Int()
    link_loads = List(LinkLoadType)
