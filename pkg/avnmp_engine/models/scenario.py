#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

WorkloadKind = Literal["constant", "linear", "sinusoid", "alternating", "trace"]


class ScenarioConfig(BaseModel):
    """Run parameters; defaults reproduce scenarios/reference.ini."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # [window]
    sliding_window: float = Field(200.0, gt=0)
    step: float = Field(20.0, gt=0)
    tick: float = Field(1.0, gt=0)
    duration: float = Field(3600.0, gt=0)

    # [tolerance]
    tolerance_start: float = Field(500.0, gt=0)
    tolerance_factor: float = Field(0.8, gt=0, le=1)
    tolerance_interval: float = Field(300.0, gt=0)

    # [hypothesis]
    smoothing_window: int = Field(16, ge=1, lt=1 << 16)
    virtual_real_ratio: int = Field(1, ge=0)
    vm_generation_rate: float = Field(0.5, gt=0)

    # [topology]
    nodes: int = Field(5, ge=1)
    link_latency: float = Field(1.0, gt=0)
    lp_events_per_tick: int = Field(4, ge=1)
    observed_node: Optional[str] = None

    # [workload]
    workload: WorkloadKind = "sinusoid"
    workload_base: float = 2000.0
    workload_amplitude: float = 1000.0
    workload_period: float = Field(1200.0, gt=0)
    workload_noise: float = Field(5.0, ge=0)
    workload_slope: float = 1.0
    workload_constant: float = 1024.0
    workload_low: int = 0
    workload_high: int = 65535
    workload_segment: Optional[float] = Field(None, gt=0)
    workload_trace: Optional[str] = None

    # [seed]
    seed: int = Field(0, ge=0, lt=1 << 64)

    # [engine]
    fossil_collection: bool = True
    report_interval: float = Field(30.0, gt=0)

    @model_validator(mode="after")
    def _check_invariants(self) -> "ScenarioConfig":
        if not self.sliding_window > self.step:
            raise ValueError(
                f"sliding window ({self.sliding_window}s) must exceed step ({self.step}s)"
            )
        if self.duration < self.tick:
            raise ValueError("duration must cover at least one tick")
        if self.workload == "trace" and not self.workload_trace:
            raise ValueError("workload 'trace' needs workload_trace")
        if self.workload_high < self.workload_low:
            raise ValueError("workload_high must not be below workload_low")
        if self.observed_node is not None and self.observed_node not in self.lp_ids:
            raise ValueError(f"observed_node '{self.observed_node}' is not one of {self.lp_ids}")
        return self

    @property
    def lp_ids(self) -> List[str]:
        return [f"lp{index}" for index in range(1, self.nodes + 1)]

    @property
    def observed(self) -> str:
        return self.observed_node or self.lp_ids[-1]

    @property
    def ticks(self) -> int:
        return int(self.duration // self.tick)

    @property
    def segment(self) -> float:
        return self.workload_segment or self.sliding_window

    def tolerance_at(self, wallclock: float) -> float:
        tightenings = int(wallclock // self.tolerance_interval)
        return self.tolerance_start * self.tolerance_factor**tightenings

    def emission_cap(self) -> int:
        """Virtual messages a Driving Process may emit per tick (rate is per ms)."""
        return max(1, int(self.vm_generation_rate * self.tick * 1000))
