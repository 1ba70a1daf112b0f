#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..handlers.exceptions import DomainError

_BINARY = frozenset("01")


@dataclass(frozen=True)
class BitString:
    """
    Immutable bit sequence kept as ASCII '0'/'1' text.
    `ones` and `zeros` are derived from `bits` on construction.
    """

    bits: str
    ones: int = field(init=False, compare=False)
    zeros: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not _BINARY.issuperset(self.bits):
            raise DomainError("BitString accepts only '0' and '1' symbols")

        ones = self.bits.count("1")
        object.__setattr__(self, "ones", ones)
        object.__setattr__(self, "zeros", len(self.bits) - ones)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitString":
        return cls("".join(f"{byte:08b}" for byte in data))

    @classmethod
    def from_hex(cls, text: str) -> "BitString":
        return cls.from_bytes(bytes.fromhex(text))

    @classmethod
    def from_array(cls, values: Sequence[int] | np.ndarray) -> "BitString":
        array = np.asarray(values, dtype=np.uint8)
        if array.size and array.max() > 1:
            raise DomainError("bit arrays may only hold 0 and 1")
        return cls((array + ord("0")).tobytes().decode("ascii"))

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "BitString":
        return cls.from_array(list(values))

    @classmethod
    def concat(cls, parts: Iterable["BitString"]) -> "BitString":
        return cls("".join(part.bits for part in parts))

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self.bits + other.bits)

    def __str__(self) -> str:
        return self.bits

    def slice(self, start: int, end: int) -> "BitString":
        if not 0 <= start < end <= len(self.bits):
            raise DomainError(
                f"slice [{start}:{end}] outside a {len(self.bits)}-bit string"
            )
        return BitString(self.bits[start:end])

    def complement(self) -> "BitString":
        return BitString(self.bits.translate(str.maketrans("01", "10")))

    def to_bytes(self) -> bytes:
        padded = self.bits + "0" * (-len(self.bits) % 8)
        return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


@dataclass(frozen=True)
class ComplexityEstimate:
    khat: float
    density: float
    source_length: int
