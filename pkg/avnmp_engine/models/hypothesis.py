#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

from ..handlers.exceptions import DomainError
from .bit_string import BitString


class HypothesisFamily(IntEnum):
    LINEAR_EXTRAPOLATION = 1


class PacketMode(IntEnum):
    ACTIVE = 0x01
    PASSIVE = 0x02


@dataclass(frozen=True)
class TimedSample:
    t: float
    value: float


@dataclass(frozen=True)
class Hypothesis:
    smoothing_window: int = 1
    step_size: float = 1.0
    family: HypothesisFamily = HypothesisFamily.LINEAR_EXTRAPOLATION

    def __post_init__(self) -> None:
        if self.smoothing_window < 1:
            raise DomainError("smoothing window must be >= 1")
        if self.smoothing_window >= 1 << 16:
            raise DomainError("smoothing window must fit in 16 bits")
        if not self.step_size > 0:
            raise DomainError("step size must be positive")

    @property
    def w(self) -> int:
        return self.smoothing_window


@dataclass(frozen=True)
class ActivePacket:
    """
    header | code | data, concatenated most-significant-bit first.
    origin_s/period_s form the frame envelope and are not counted in l(packet).
    """

    mode: PacketMode
    header: BitString
    code: BitString
    data: BitString
    origin_s: float
    period_s: float

    @property
    def total_length(self) -> int:
        return len(self.header) + len(self.code) + len(self.data)

    @property
    def wire(self) -> BitString:
        return BitString.concat((self.header, self.code, self.data))


def ensure_increasing(series: Sequence[TimedSample]) -> None:
    for earlier, later in zip(series, series[1:]):
        if not later.t > earlier.t:
            raise DomainError(
                f"sample times must strictly increase ({earlier.t} then {later.t})"
            )
