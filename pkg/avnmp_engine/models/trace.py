#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Tuple

from ..handlers.exceptions import ValidationError
from .hypothesis import TimedSample
from .scenario import ScenarioConfig

EVENT_TYPES = (
    "tolerance",
    "message",
    "rollback",
    "verify",
    "commit",
    "reprime",
    "process",
    "snapshot",
    "fossil",
)


def _json_number(value: float | None) -> float | str | None:
    if value is None or math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    tick: int
    type: str
    src: str = ""
    dst: str = ""
    ts: float | None = None
    value: float | None = None
    sign: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tick": self.tick,
            "type": self.type,
            "src": self.src,
            "dst": self.dst,
            "ts": _json_number(self.ts),
            "value": _json_number(self.value),
            "sign": self.sign,
        }


@dataclass
class EventTrace:
    scenario: ScenarioConfig
    lp_ids: List[str]
    workload: List[float] = field(default_factory=list)
    events: List[TraceEvent] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=dict)
    completed: bool = False

    def of_type(self, *types: str) -> Iterator[TraceEvent]:
        return (event for event in self.events if event.type in types)

    def workload_samples(self) -> List[TimedSample]:
        tick = self.scenario.tick
        return [TimedSample(index * tick, value) for index, value in enumerate(self.workload)]

    def committed(self) -> Dict[str, List[Tuple[float, float]]]:
        """Committed (lvt, value) pairs per process in lvt order."""
        sequences: Dict[str, List[Tuple[float, float]]] = {lp_id: [] for lp_id in self.lp_ids}
        for event in self.of_type("commit"):
            sequences[event.src].append((event.ts, event.value))
        return {lp_id: sorted(pairs) for lp_id, pairs in sequences.items()}


@dataclass(frozen=True)
class MetricSeries:
    name: str
    samples: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        for (t0, _), (t1, _) in zip(self.samples, self.samples[1:]):
            if not t1 > t0:
                raise ValidationError(f"series '{self.name}': wallclock {t1} follows {t0}")

    @property
    def times(self) -> List[float]:
        return [t for t, _ in self.samples]

    @property
    def values(self) -> List[float]:
        return [v for _, v in self.samples]

    def between(self, start: float, end: float) -> List[float]:
        return [v for t, v in self.samples if start <= t < end]
