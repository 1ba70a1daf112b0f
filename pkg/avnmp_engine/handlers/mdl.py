#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from collections import deque
from dataclasses import dataclass
from statistics import median
from typing import Deque, Iterable, List, Sequence, Tuple

from ..models.bit_string import BitString
from ..models.hypothesis import (
    ActivePacket,
    Hypothesis,
    HypothesisFamily,
    PacketMode,
    TimedSample,
    ensure_increasing,
)
from .bitstream import BitReader, BitWriter, decode_residuals, encode_residuals
from .exceptions import AlignmentError, DomainError, FormatError

PACKET_MAGIC = 0xA7E5
PACKET_VERSION = 1
HEADER_BITS = 32
CODE_BITS = 8 + 16 + 32
SAMPLE_BITS = 32
_TIME_TOLERANCE = 1e-9


class _Extrapolator:
    """Causal running average plus a line through its last two points."""

    def __init__(self, w: int) -> None:
        self._window: Deque[float] = deque(maxlen=w)
        self._tail: Deque[Tuple[float, float]] = deque(maxlen=2)

    def push(self, t: float, value: float) -> float:
        self._window.append(value)
        smoothed = sum(self._window) / len(self._window)
        self._tail.append((t, smoothed))
        return smoothed

    def value_at(self, t: float) -> float:
        if not self._tail:
            raise DomainError("cannot extrapolate from an empty history")

        t_last, s_last = self._tail[-1]
        if len(self._tail) < 2:
            return s_last

        t_prev, s_prev = self._tail[0]
        slope = (s_last - s_prev) / (t_last - t_prev)
        return s_last + slope * (t - t_last)


def _primed(h: Hypothesis, history: Sequence[TimedSample]) -> _Extrapolator:
    if not history:
        raise DomainError("history must hold at least one sample")
    ensure_increasing(history)

    extrapolator = _Extrapolator(h.w)
    for sample in history:
        extrapolator.push(sample.t, sample.value)
    return extrapolator


def smooth(history: Sequence[TimedSample], w: int) -> List[TimedSample]:
    if w < 1:
        raise DomainError("smoothing window must be >= 1")
    if not history:
        raise DomainError("history must hold at least one sample")

    extrapolator = _Extrapolator(w)
    return [
        TimedSample(sample.t, extrapolator.push(sample.t, sample.value))
        for sample in history
    ]


def extrapolate(
    h: Hypothesis, history: Sequence[TimedSample], at_times: Iterable[float]
) -> List[TimedSample]:
    extrapolator = _primed(h, history)
    return [TimedSample(t, extrapolator.value_at(t)) for t in at_times]


def predict(h: Hypothesis, history: Sequence[TimedSample], steps: int) -> List[TimedSample]:
    if steps <= 0:
        return []
    t_last = history[-1].t if history else 0.0
    return extrapolate(h, history, (t_last + k * h.step_size for k in range(1, steps + 1)))


def residual(actual: Sequence[TimedSample], predicted: Sequence[TimedSample]) -> List[int]:
    if len(actual) != len(predicted):
        raise AlignmentError(
            f"series lengths differ ({len(actual)} actual, {len(predicted)} predicted)"
        )

    errors = []
    for a, p in zip(actual, predicted):
        if abs(a.t - p.t) > _TIME_TOLERANCE:
            raise AlignmentError(f"timestamps differ: {a.t} vs {p.t}")
        errors.append(int(round(a.value)) - int(round(p.value)))
    return errors


def _quantize(data: Sequence[TimedSample]) -> List[TimedSample]:
    if not data:
        raise DomainError("data must hold at least one sample")
    ensure_increasing(data)
    return [TimedSample(sample.t, int(round(sample.value))) for sample in data]


def in_sample_residuals(h: Hypothesis, data: Sequence[TimedSample]) -> List[int]:
    """One-step-ahead residuals for samples 1..n-1; sample 0 travels verbatim."""
    quantized = _quantize(data)
    extrapolator = _Extrapolator(h.w)
    extrapolator.push(quantized[0].t, quantized[0].value)

    errors = []
    for sample in quantized[1:]:
        errors.append(sample.value - int(round(extrapolator.value_at(sample.t))))
        extrapolator.push(sample.t, sample.value)
    return errors


def summed_abs_error(h: Hypothesis, data: Sequence[TimedSample]) -> int:
    return sum(abs(e) for e in in_sample_residuals(h, data))


def encode_hypothesis(h: Hypothesis) -> BitString:
    step_ms = int(round(h.step_size * 1000))
    if not 0 < step_ms < 1 << 32:
        raise DomainError(f"step size {h.step_size}s cannot be coded in 32-bit milliseconds")

    return (
        BitWriter()
        .write_uint(int(h.family), 8)
        .write_uint(h.w, 16)
        .write_uint(step_ms, 32)
        .to_bitstring()
    )


def decode_hypothesis(code: BitString) -> Hypothesis:
    reader = BitReader(code)
    tag = reader.read_uint(8)
    try:
        family = HypothesisFamily(tag)
    except ValueError:
        raise FormatError(f"unknown hypothesis family tag {tag}") from None

    w = reader.read_uint(16)
    step_ms = reader.read_uint(32)
    if w < 1 or step_ms < 1:
        raise FormatError("hypothesis code carries a zero window or step")
    return Hypothesis(smoothing_window=w, step_size=step_ms / 1000, family=family)


def _header(mode: PacketMode) -> BitString:
    return (
        BitWriter()
        .write_uint(PACKET_MAGIC, 16)
        .write_uint(PACKET_VERSION, 8)
        .write_uint(int(mode), 8)
        .to_bitstring()
    )


def _active_data(h: Hypothesis, data: Sequence[TimedSample]) -> BitString:
    quantized = _quantize(data)
    writer = BitWriter().write_int(int(quantized[0].value), SAMPLE_BITS)
    return encode_residuals(in_sample_residuals(h, quantized), writer).to_bitstring()


def _passive_data(data: Sequence[TimedSample]) -> BitString:
    writer = BitWriter()
    for sample in _quantize(data):
        writer.write_int(int(sample.value), SAMPLE_BITS)
    return writer.to_bitstring()


def description_length(h: Hypothesis, data: Sequence[TimedSample]) -> int:
    """l(H_e) + l(D|H_e) + l(E) in bits, header included."""
    return HEADER_BITS + CODE_BITS + len(_active_data(h, data))


def passive_length(data: Sequence[TimedSample]) -> int:
    return HEADER_BITS + SAMPLE_BITS * len(_quantize(data))


@dataclass(frozen=True)
class HypothesisScore:
    w: int
    summed_abs_error: int
    description_length: int
    selected: bool = False


def _infer_step(data: Sequence[TimedSample]) -> float:
    if len(data) < 2:
        return 1.0
    return float(median(b.t - a.t for a, b in zip(data, data[1:])))


def hypothesis_sweep(
    grid: Sequence[int], data: Sequence[TimedSample], step_size: float | None = None
) -> List[HypothesisScore]:
    if not grid:
        raise DomainError("hypothesis grid is empty")

    step = step_size or _infer_step(data)
    rows = [
        HypothesisScore(
            w=w,
            summed_abs_error=summed_abs_error(Hypothesis(w, step), data),
            description_length=description_length(Hypothesis(w, step), data),
        )
        for w in grid
    ]
    best = min(rows, key=lambda row: (row.description_length, row.w))
    return [
        HypothesisScore(row.w, row.summed_abs_error, row.description_length, row is best)
        for row in rows
    ]


def select_hypothesis(
    grid: Sequence[int], data: Sequence[TimedSample], step_size: float | None = None
) -> Tuple[Hypothesis, int]:
    step = step_size or _infer_step(data)
    best = next(row for row in hypothesis_sweep(grid, data, step) if row.selected)
    return Hypothesis(best.w, step), best.description_length


def code_data_tradeoff(
    grid: Sequence[int], data: Sequence[TimedSample]
) -> List[Tuple[int, int, int, float]]:
    """(w, code bits, data bits, code share of the packet) for each hypothesis."""
    step = _infer_step(data)
    rows = []
    for w in grid:
        data_bits = len(_active_data(Hypothesis(w, step), data))
        rows.append((w, CODE_BITS, data_bits, CODE_BITS / (CODE_BITS + data_bits)))
    return rows


def _frame(h: Hypothesis, data: Sequence[TimedSample]) -> Tuple[float, float]:
    if len(data) < 2:
        return data[0].t, h.step_size

    period = data[1].t - data[0].t
    for index, sample in enumerate(data):
        expected = data[0].t + index * period
        if abs(sample.t - expected) > _TIME_TOLERANCE * max(1.0, abs(expected)):
            raise DomainError("packets carry uniformly spaced series only")
    return data[0].t, period


def encode_packet(h: Hypothesis, data: Sequence[TimedSample], mode: PacketMode) -> ActivePacket:
    quantized = _quantize(data)
    origin, period = _frame(h, quantized)

    if mode is PacketMode.ACTIVE:
        code, payload = encode_hypothesis(h), _active_data(h, quantized)
    else:
        code, payload = BitString(""), _passive_data(quantized)

    return ActivePacket(
        mode=mode,
        header=_header(mode),
        code=code,
        data=payload,
        origin_s=origin,
        period_s=period,
    )


def parse_packet(bits: BitString, origin_s: float, period_s: float) -> ActivePacket:
    reader = BitReader(bits)
    if reader.remaining < HEADER_BITS:
        raise FormatError("packet shorter than its header")

    magic, version, flags = reader.read_uint(16), reader.read_uint(8), reader.read_uint(8)
    if magic != PACKET_MAGIC:
        raise FormatError(f"bad packet magic 0x{magic:04X}")
    if version != PACKET_VERSION:
        raise FormatError(f"unsupported packet version {version}")
    try:
        mode = PacketMode(flags)
    except ValueError:
        raise FormatError(f"unknown packet flags 0x{flags:02X}") from None

    code = BitString(reader.read_bits(CODE_BITS)) if mode is PacketMode.ACTIVE else BitString("")
    payload = BitString(reader.read_bits(reader.remaining))
    return ActivePacket(mode, BitString(str(bits)[:HEADER_BITS]), code, payload, origin_s, period_s)


def decode_packet(p: ActivePacket) -> List[TimedSample]:
    packet = parse_packet(p.wire, p.origin_s, p.period_s)
    reader = BitReader(packet.data)

    if packet.mode is PacketMode.PASSIVE:
        if reader.remaining == 0 or reader.remaining % SAMPLE_BITS:
            raise FormatError("passive payload is not a whole number of samples")
        values = [reader.read_int(SAMPLE_BITS) for _ in range(reader.remaining // SAMPLE_BITS)]
    else:
        h = decode_hypothesis(packet.code)
        values = [reader.read_int(SAMPLE_BITS)]
        residuals = decode_residuals(reader)

        extrapolator = _Extrapolator(h.w)
        extrapolator.push(p.origin_s, values[0])
        for index, error in enumerate(residuals, start=1):
            t = p.origin_s + index * p.period_s
            value = int(round(extrapolator.value_at(t))) + error
            extrapolator.push(t, value)
            values.append(value)

    return [
        TimedSample(p.origin_s + index * p.period_s, value)
        for index, value in enumerate(values)
    ]
