#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from dataclasses import dataclass, replace
from enum import Enum
from typing import Tuple

from ..handlers.exceptions import DomainError


class Sign(str, Enum):
    POSITIVE = "POSITIVE"
    ANTI = "ANTI"


class VerifyStatus(str, Enum):
    IN_TOLERANCE = "IN_TOLERANCE"
    OUT_OF_TOLERANCE = "OUT_OF_TOLERANCE"


@dataclass(frozen=True)
class VirtualMessage:
    id: str
    src: str
    dst: str
    send_ts: float
    recv_ts: float
    value: float
    sign: Sign = Sign.POSITIVE

    def __post_init__(self) -> None:
        if self.recv_ts < self.send_ts:
            raise DomainError(
                f"message {self.id}: recv_ts {self.recv_ts} precedes send_ts {self.send_ts}"
            )

    @property
    def is_anti(self) -> bool:
        return self.sign is Sign.ANTI

    def anti(self) -> "VirtualMessage":
        return replace(self, sign=Sign.ANTI)

    def delivery_key(self) -> Tuple[float, str, str, int]:
        # Positive twins are delivered ahead of their anti-messages.
        return (self.recv_ts, self.src, self.id, 1 if self.is_anti else 0)


@dataclass
class StateEntry:
    lvt: float
    value: float
    committed: bool = False
    cause: str = ""


@dataclass(frozen=True)
class SavedSend:
    message: VirtualMessage
    cause: str


@dataclass(frozen=True)
class VerifyResult:
    status: VerifyStatus
    predicted: float | None
    actual: float
    antis: Tuple[VirtualMessage, ...] = ()

    @property
    def error(self) -> float | None:
        """Signed predicted - actual, absent when nothing was predicted."""
        return None if self.predicted is None else self.predicted - self.actual
