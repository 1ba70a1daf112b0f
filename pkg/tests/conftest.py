#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import logging
from pathlib import Path

import numpy as np
import pytest

from avnmp_engine.handlers.config import Config

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def logger() -> logging.Logger:
    return logging.getLogger("avnmp-test")


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS


@pytest.fixture(autouse=True)
def config(logger, monkeypatch) -> type[Config]:
    for name in ("AVNMP_SEED", "AVNMP_OUT_DIR", "AVNMP_LOG_LEVEL", "AVNMP_SAMPLE_WIDTH", "AVNMP_ESTIMATOR"):
        monkeypatch.delenv(name, raising=False)
    Config.initialize(logger)
    return Config
