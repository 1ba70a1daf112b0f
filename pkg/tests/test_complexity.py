#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import math

import numpy as np
import pytest

from avnmp_engine.handlers.complexity import (
    FixedWidthCodec,
    binary_entropy,
    complexity_density,
    estimate_complexity,
    expected_complexity,
    get_estimator,
    windowed_complexity,
)
from avnmp_engine.handlers.exceptions import DomainError
from avnmp_engine.models.bit_string import BitString


def test_bit_string_counts_and_length():
    x = BitString("0110100")
    assert (x.ones, x.zeros) == (3, 4)
    assert x.length == len(x) == x.ones + x.zeros


def test_bit_string_rejects_foreign_symbols():
    with pytest.raises(DomainError):
        BitString("0121")


def test_bit_string_constructors_agree():
    assert BitString.from_bytes(b"\xa5") == BitString("10100101")
    assert BitString.from_hex("a5") == BitString("10100101")
    assert BitString.from_array(np.array([1, 0, 1])) == BitString("101")
    assert BitString.concat([BitString("10"), BitString("01")]) == BitString("1001")
    assert BitString("1100").complement() == BitString("0011")
    assert BitString("110010").slice(1, 4) == BitString("100")


def test_bit_string_slice_bounds():
    with pytest.raises(DomainError):
        BitString("1010").slice(2, 5)


@pytest.mark.parametrize(
    "p, expected", [(0.5, 1.0), (0.0, 0.0), (1.0, 0.0), (0.25, 0.811278)]
)
def test_binary_entropy(p, expected):
    assert binary_entropy(p) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_binary_entropy_outside_unit_interval(p):
    with pytest.raises(DomainError):
        binary_entropy(p)


def test_estimate_complexity_reference_values():
    assert estimate_complexity(BitString("0" * 1024)).khat == pytest.approx(10.0)
    assert estimate_complexity(BitString("01" * 512)).khat == pytest.approx(1034.0)
    assert estimate_complexity(BitString("1111" + "0" * 12)).khat == pytest.approx(16.980, abs=1e-3)


def test_estimate_complexity_empty_string():
    with pytest.raises(DomainError):
        estimate_complexity(BitString(""))


def test_complexity_density_reference_values():
    assert complexity_density(BitString("0" * 1024)) == pytest.approx(10 / 1024)
    assert complexity_density(BitString("01" * 512)) == pytest.approx(1034 / 1024)
    assert complexity_density(BitString("0")) == 0.0


@pytest.mark.parametrize("estimator", ["entropy", "zlib"])
def test_estimator_bounds_hold_on_random_strings(rng, estimator):
    for _ in range(10_000):
        n = int(rng.integers(1, 4097))
        p = float(rng.random())
        x = BitString.from_array((rng.random(n) < p).astype(np.uint8))
        estimate = estimate_complexity(x, estimator)
        assert math.log2(n) - 1e-9 <= estimate.khat <= n + math.log2(n) + 1e-9
        assert estimate.density == estimate.khat / n


def test_expected_complexity_of_random_strings(rng):
    assert 972.8 <= expected_complexity(1024, 1000, rng) <= 1035


def test_unknown_estimator():
    with pytest.raises(DomainError, match="registered"):
        get_estimator("gzip")


def test_fixed_width_codec_twos_complement():
    codec = FixedWidthCodec(8)
    assert codec.encode_value(5) == "00000101"
    assert codec.encode_value(-1) == "11111111"
    assert codec.decode_value("11111110") == -2
    with pytest.raises(DomainError):
        codec.encode_value(128)


def test_windowed_complexity_constant_windows_match():
    estimates = windowed_complexity([5, 5, 5, 5], 2, FixedWidthCodec(8))
    assert len(estimates) == 2
    assert estimates[0] == estimates[1]


def test_windowed_complexity_random_samples_are_dense(rng):
    samples = rng.integers(-(2**31), 2**31, size=256)
    for estimate in windowed_complexity(samples.tolist(), 8):
        assert 0.95 <= estimate.density <= 1.05


def test_windowed_complexity_random_half_is_denser(rng):
    samples = [1024] * 64 + rng.integers(0, 65536, size=64).tolist()
    estimates = windowed_complexity(samples, 16)
    first, second = estimates[:4], estimates[4:]
    assert min(e.density for e in second) > max(e.density for e in first)


def test_windowed_complexity_window_longer_than_series():
    with pytest.raises(DomainError):
        windowed_complexity([1, 2, 3], 4)
