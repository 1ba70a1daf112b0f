#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

__all__ = ["AVNMPEngine", "main"]
from .main import AVNMPEngine, main
