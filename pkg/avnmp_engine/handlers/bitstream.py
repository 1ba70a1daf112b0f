#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from typing import Iterable, List

from ..models.bit_string import BitString
from .exceptions import DomainError, FormatError


def zigzag(value: int) -> int:
    """Map 0, -1, 1, -2, 2 ... onto 0, 1, 2, 3, 4 ..."""
    return 2 * value if value >= 0 else -2 * value - 1


def unzigzag(value: int) -> int:
    return value // 2 if value % 2 == 0 else -(value + 1) // 2


def elias_gamma(n: int) -> str:
    if n < 1:
        raise DomainError(f"Elias gamma codes positive integers only, got {n}")
    binary = bin(n)[2:]
    return "0" * (len(binary) - 1) + binary


class BitWriter:
    def __init__(self) -> None:
        self._chunks: List[str] = []

    def write_bits(self, bits: str | BitString) -> "BitWriter":
        self._chunks.append(str(bits))
        return self

    def write_uint(self, value: int, width: int) -> "BitWriter":
        if not 0 <= value < (1 << width):
            raise DomainError(f"{value} does not fit in {width} unsigned bits")
        self._chunks.append(format(value, f"0{width}b"))
        return self

    def write_int(self, value: int, width: int) -> "BitWriter":
        low, high = -(1 << (width - 1)), (1 << (width - 1)) - 1
        if not low <= value <= high:
            raise DomainError(f"{value} does not fit in {width} signed bits")
        return self.write_uint(value & ((1 << width) - 1), width)

    def write_gamma(self, n: int) -> "BitWriter":
        self._chunks.append(elias_gamma(n))
        return self

    def to_bitstring(self) -> BitString:
        return BitString("".join(self._chunks))


class BitReader:
    def __init__(self, bits: str | BitString) -> None:
        self._bits = str(bits)
        self._position = 0

    @property
    def remaining(self) -> int:
        return len(self._bits) - self._position

    def exhausted(self) -> bool:
        return self._position >= len(self._bits)

    def read_bits(self, count: int) -> str:
        if count > self.remaining:
            raise FormatError(
                f"truncated stream: wanted {count} bits at offset "
                f"{self._position}, {self.remaining} left"
            )
        chunk = self._bits[self._position : self._position + count]
        self._position += count
        return chunk

    def read_uint(self, width: int) -> int:
        return int(self.read_bits(width), 2)

    def read_int(self, width: int) -> int:
        value = self.read_uint(width)
        return value - (1 << width) if value >> (width - 1) else value

    def read_gamma(self) -> int:
        zeros = 0
        while True:
            if self.exhausted():
                raise FormatError("truncated Elias gamma prefix")
            if self._bits[self._position] == "1":
                break
            zeros += 1
            self._position += 1
        return int(self.read_bits(zeros + 1), 2)


# Residual token alphabet: gamma(1) escapes a zero run, gamma(z + 2) is a value.
ZERO_RUN_MIN = 8
_ESCAPE = 1
_VALUE_OFFSET = 2


def encode_residuals(residuals: Iterable[int], writer: BitWriter | None = None) -> BitWriter:
    writer = writer or BitWriter()
    values = list(residuals)
    index = 0

    while index < len(values):
        run = 0
        while index + run < len(values) and values[index + run] == 0:
            run += 1

        if run >= ZERO_RUN_MIN:
            writer.write_gamma(_ESCAPE).write_gamma(run - ZERO_RUN_MIN + 1)
            index += run
            continue

        writer.write_gamma(zigzag(values[index]) + _VALUE_OFFSET)
        index += 1

    return writer


def decode_residuals(reader: BitReader) -> List[int]:
    """Read residual tokens until the stream is exhausted."""
    values: List[int] = []

    while not reader.exhausted():
        token = reader.read_gamma()
        if token == _ESCAPE:
            values.extend([0] * (reader.read_gamma() + ZERO_RUN_MIN - 1))
        else:
            values.append(unzigzag(token - _VALUE_OFFSET))

    return values
