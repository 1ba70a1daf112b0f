#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Sequence

import numpy as np

from ..models.hypothesis import TimedSample
from ..models.scenario import ScenarioConfig
from .exceptions import ConfigurationError


def constant(n: int, value: float) -> np.ndarray:
    return np.full(n, float(value))


def linear(n: int, slope: float, intercept: float, tick: float = 1.0) -> np.ndarray:
    return intercept + slope * tick * np.arange(n, dtype=float)


def sinusoid(
    n: int,
    base: float,
    amplitude: float,
    period: float,
    noise: float,
    rng: np.random.Generator,
    tick: float = 1.0,
) -> np.ndarray:
    t = tick * np.arange(n, dtype=float)
    values = base + amplitude * np.sin(2.0 * np.pi * t / period)
    if noise > 0:
        values = values + rng.normal(0.0, noise, size=n)
    return values


def alternating(
    n: int,
    segment: int,
    value: float,
    low: int,
    high: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Constant segments interleaved with uniform integer noise, constant first."""
    values = np.full(n, float(value))
    noisy = (np.arange(n) // max(segment, 1)) % 2 == 1
    values[noisy] = rng.integers(low, high + 1, size=int(noisy.sum())).astype(float)
    return values


def resample(samples: Sequence[TimedSample], n: int, tick: float = 1.0) -> np.ndarray:
    """Hold each trace sample until the next one (step-wise) on the tick grid."""
    if not samples:
        raise ConfigurationError("workload trace is empty")

    times = np.array([sample.t for sample in samples], dtype=float)
    values = np.array([sample.value for sample in samples], dtype=float)
    grid = tick * np.arange(n, dtype=float)
    index = np.clip(np.searchsorted(times, grid, side="right") - 1, 0, len(values) - 1)
    return values[index]


def build_workload(
    scenario: ScenarioConfig,
    rng: np.random.Generator,
    trace: Sequence[TimedSample] | None = None,
) -> np.ndarray:
    n = scenario.ticks
    kind = scenario.workload

    if kind == "constant":
        return constant(n, scenario.workload_constant)
    if kind == "linear":
        return linear(n, scenario.workload_slope, scenario.workload_base, scenario.tick)
    if kind == "sinusoid":
        return sinusoid(
            n,
            scenario.workload_base,
            scenario.workload_amplitude,
            scenario.workload_period,
            scenario.workload_noise,
            rng,
            scenario.tick,
        )
    if kind == "alternating":
        return alternating(
            n,
            int(round(scenario.segment / scenario.tick)),
            scenario.workload_constant,
            scenario.workload_low,
            scenario.workload_high,
            rng,
        )
    if trace is None:
        raise ConfigurationError("trace workload requested but no trace was loaded")
    return resample(trace, n, scenario.tick)
