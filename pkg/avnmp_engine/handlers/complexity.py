#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import math
import zlib
from typing import Callable, Dict, List, Sequence

import numpy as np

from ..models.bit_string import BitString, ComplexityEstimate
from .exceptions import DomainError

Estimator = Callable[[BitString], float]

_ESTIMATORS: Dict[str, Estimator] = {}


def binary_entropy(p: float) -> float:
    """Shannon entropy of a Bernoulli(p) source in bits per symbol (0·log 0 = 0)."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"probability {p} outside [0, 1]")

    return sum(-q * math.log2(q) for q in (p, 1.0 - p) if q > 0.0)


def _entropy_khat(x: BitString) -> float:
    n = len(x)
    return n * binary_entropy(x.ones / n) + math.log2(n)


def _zlib_khat(x: BitString) -> float:
    # Compressed size clamped into the bounds the entropy estimator obeys.
    n = len(x)
    compressed = 8 * len(zlib.compress(x.to_bytes(), 9))
    return min(max(float(compressed), math.log2(n)), n + math.log2(n))


def register_estimator(name: str, estimator: Estimator) -> None:
    _ESTIMATORS[name] = estimator


def get_estimator(name: str) -> Estimator:
    try:
        return _ESTIMATORS[name]
    except KeyError:
        raise DomainError(
            f"unknown complexity estimator '{name}' "
            f"(registered: {', '.join(sorted(_ESTIMATORS))})"
        ) from None


register_estimator("entropy", _entropy_khat)
register_estimator("zlib", _zlib_khat)


def estimate_complexity(x: BitString, estimator: str = "entropy") -> ComplexityEstimate:
    if len(x) == 0:
        raise DomainError("complexity of the empty string is undefined")

    khat = get_estimator(estimator)(x)
    return ComplexityEstimate(khat=khat, density=khat / len(x), source_length=len(x))


def complexity_density(x: BitString, estimator: str = "entropy") -> float:
    return estimate_complexity(x, estimator).density


class FixedWidthCodec:
    """Two's-complement integer samples, most significant bit first."""

    def __init__(self, width: int = 32) -> None:
        if width < 1:
            raise DomainError("codec width must be at least one bit")
        self.width = width
        self._low = -(1 << (width - 1))
        self._high = (1 << (width - 1)) - 1

    def encode_value(self, value: float) -> str:
        integer = int(round(value))
        if not self._low <= integer <= self._high:
            raise DomainError(f"sample {value} does not fit in {self.width} bits")
        return format(integer & ((1 << self.width) - 1), f"0{self.width}b")

    def encode(self, values: Sequence[float]) -> BitString:
        return BitString("".join(self.encode_value(value) for value in values))

    def decode_value(self, bits: str) -> int:
        if len(bits) != self.width:
            raise DomainError(f"expected {self.width} bits, got {len(bits)}")
        integer = int(bits, 2)
        return integer - (1 << self.width) if bits[0] == "1" else integer


def windowed_complexity(
    samples: Sequence[float],
    window: int,
    codec: FixedWidthCodec | None = None,
    estimator: str = "entropy",
) -> List[ComplexityEstimate]:
    if window < 1:
        raise DomainError("window must hold at least one sample")
    if window > len(samples):
        raise DomainError(
            f"window of {window} samples exceeds the {len(samples)}-sample series"
        )

    codec = codec or FixedWidthCodec()
    return [
        estimate_complexity(codec.encode(samples[start : start + window]), estimator)
        for start in range(0, len(samples) - window + 1, window)
    ]


def expected_complexity(
    n: int, trials: int, rng: np.random.Generator, estimator: str = "entropy"
) -> float:
    """Mean estimate over `trials` uniformly random n-bit strings."""
    if n < 1 or trials < 1:
        raise DomainError("expected complexity needs n >= 1 and trials >= 1")

    draws = rng.integers(0, 2, size=(trials, n), dtype=np.uint8)
    return float(
        np.mean([estimate_complexity(BitString.from_array(row), estimator).khat for row in draws])
    )
