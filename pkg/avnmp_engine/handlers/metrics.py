#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from ..models.hypothesis import TimedSample, ensure_increasing
from ..models.trace import EventTrace, MetricSeries
from ..models.virtual_message import Sign, VerifyStatus
from .avnmp_utility import parse_number, read_csv, write_csv
from .complexity import FixedWidthCodec, windowed_complexity
from .exceptions import AlignmentError, InsufficientDataError, ValidationError

SERIES_NAMES = (
    "tolerance",
    "out_of_tolerance_proportion",
    "prediction_error",
    "expected_lookahead",
    "speedup",
    "virtual_messages",
    "anti_messages",
    "task_time",
    "rollbacks",
)


def spearman(a: Sequence[float], b: Sequence[float]) -> Optional[float]:
    """Spearman rank correlation; absent when either side has no variance."""
    if len(a) != len(b):
        raise AlignmentError(f"rank correlation over {len(a)} and {len(b)} values")
    if len(a) < 2 or np.ptp(np.asarray(a, dtype=float)) == 0 or np.ptp(np.asarray(b, dtype=float)) == 0:
        return None

    rho, _ = spearmanr(a, b)
    return float(rho)


def derive_metrics(
    trace: EventTrace, observed: str | None = None, interval: float | None = None
) -> Dict[str, MetricSeries]:
    if not trace.completed:
        raise ValidationError("trace is incomplete: the run did not finish")

    scenario = trace.scenario
    observed = observed or scenario.observed
    interval = interval or scenario.report_interval
    if observed not in trace.lp_ids:
        raise ValidationError(f"no logical process '{observed}' in trace")

    tolerance: List[tuple] = []
    tightenings = set()
    verifies: Dict[int, str] = {}
    errors: List[tuple] = []
    lvts: Dict[int, float] = {}
    positives: Dict[int, int] = defaultdict(int)
    antis: Dict[int, int] = defaultdict(int)
    costs: Dict[int, List[float]] = defaultdict(list)
    rollbacks: Dict[int, int] = defaultdict(int)

    for event in trace.events:
        if event.type == "tolerance":
            tolerance.append((event.ts, event.value))
            if event.tick > 0:
                tightenings.add(event.tick)
        elif event.type == "message":
            if event.sign == Sign.ANTI.value:
                antis[event.tick] += 1
            else:
                positives[event.tick] += 1
        elif event.type == "process":
            costs[event.tick].append(event.value)
        elif event.src != observed:
            continue
        elif event.type == "verify":
            verifies[event.tick] = event.sign
            if event.value is not None:
                errors.append((event.ts, event.value))
        elif event.type == "snapshot":
            lvts[event.tick] = event.ts
        elif event.type == "rollback":
            rollbacks[event.tick] += 1

    if not lvts:
        raise ValidationError("trace holds no snapshots of the observed process")

    tick = scenario.tick
    last_tick = max(lvts)

    buckets: Dict[int, List[bool]] = defaultdict(list)
    for index, status in verifies.items():
        buckets[int(index * tick // interval)].append(status == VerifyStatus.OUT_OF_TOLERANCE.value)

    cumulative_positive = cumulative_anti = cumulative_rollbacks = 0
    virtual_series, anti_series, rollback_series = [], [], []
    for index in range(last_tick + 1):
        if index in tightenings:
            cumulative_anti = 0
        cumulative_positive += positives.get(index, 0)
        cumulative_anti += antis.get(index, 0)
        cumulative_rollbacks += rollbacks.get(index, 0)
        wallclock = index * tick
        virtual_series.append((wallclock, float(cumulative_positive)))
        anti_series.append((wallclock, float(cumulative_anti)))
        rollback_series.append((wallclock, float(cumulative_rollbacks)))

    return {
        "tolerance": MetricSeries("tolerance", tuple(tolerance)),
        "out_of_tolerance_proportion": MetricSeries(
            "out_of_tolerance_proportion",
            tuple(
                (bucket * interval, sum(flags) / len(flags))
                for bucket, flags in sorted(buckets.items())
            ),
        ),
        "prediction_error": MetricSeries("prediction_error", tuple(errors)),
        "expected_lookahead": MetricSeries(
            "expected_lookahead",
            tuple((i * tick, lvt - i * tick) for i, lvt in sorted(lvts.items())),
        ),
        "speedup": MetricSeries(
            "speedup",
            tuple((i * tick, lvt / (i * tick)) for i, lvt in sorted(lvts.items()) if i > 0),
        ),
        "virtual_messages": MetricSeries("virtual_messages", tuple(virtual_series)),
        "anti_messages": MetricSeries("anti_messages", tuple(anti_series)),
        "task_time": MetricSeries(
            "task_time",
            tuple((i * tick, float(np.mean(values))) for i, values in sorted(costs.items())),
        ),
        "rollbacks": MetricSeries("rollbacks", tuple(rollback_series)),
    }


def interval_means(
    series: MetricSeries, interval: float, start: float = 0.0, absolute: bool = False
) -> MetricSeries:
    """Mean value per interval-long bucket from `start`, empty buckets skipped."""
    buckets: Dict[int, List[float]] = defaultdict(list)
    for t, value in series.samples:
        if t >= start:
            buckets[int((t - start) // interval)].append(abs(value) if absolute else value)
    return MetricSeries(
        f"{series.name}_mean",
        tuple((start + b * interval, float(np.mean(v))) for b, v in sorted(buckets.items())),
    )


def trend(series: MetricSeries, start: float = 0.0) -> Optional[float]:
    """Rank correlation of a series against wallclock, from `start` on."""
    samples = [(t, v) for t, v in series.samples if t >= start]
    return spearman([t for t, _ in samples], [v for _, v in samples])


TREND_SERIES = (
    ("out_of_tolerance_proportion", False),
    ("prediction_error", True),
    ("expected_lookahead", False),
    ("speedup", False),
)


def trend_summary(
    metrics: Dict[str, MetricSeries], interval: float, start: float = 0.0
) -> Dict[str, Optional[float]]:
    """
    Wallclock trend of the tolerance-sensitive series, one mean per interval.
    With `interval` set to the tolerance interval each point covers one tolerance setting.
    """
    return {
        name: trend(interval_means(metrics[name], interval, start, absolute), start)
        for name, absolute in TREND_SERIES
    }


@dataclass(frozen=True)
class JoinRow:
    window_start_s: float
    density: float
    mean_abs_error: float


@dataclass(frozen=True)
class ComplexityErrorJoin:
    rows: List[JoinRow]
    rho: Optional[float]


def complexity_error_join(
    workload: Sequence[TimedSample],
    errors: MetricSeries,
    window: float,
    codec: FixedWidthCodec | None = None,
    estimator: str = "entropy",
) -> ComplexityErrorJoin:
    if not workload:
        raise InsufficientDataError("workload series is empty")
    ensure_increasing(workload)

    origin = workload[0].t
    per_window = sum(1 for sample in workload if sample.t < origin + window)
    if per_window < 1:
        raise InsufficientDataError("workload shorter than one window")

    estimates = windowed_complexity(
        [sample.value for sample in workload], per_window, codec, estimator
    )

    rows: List[JoinRow] = []
    for index, estimate in enumerate(estimates):
        start = origin + index * window
        window_errors = errors.between(start, start + window)
        if window_errors:
            rows.append(
                JoinRow(start, estimate.density, float(np.mean(np.abs(window_errors))))
            )

    if len(rows) < 3:
        raise InsufficientDataError(
            f"complexity/error join needs at least 3 windows with errors, got {len(rows)}"
        )

    return ComplexityErrorJoin(
        rows, spearman([r.density for r in rows], [r.mean_abs_error for r in rows])
    )


def write_metric_series(directory: str | Path, series: Dict[str, MetricSeries]) -> List[Path]:
    directory = Path(directory)
    return [
        write_csv(directory / f"{name}.csv", ("wallclock_s", "value"), metric.samples)
        for name, metric in series.items()
    ]


def read_metric_series(path: str | Path) -> MetricSeries:
    path = Path(path)
    rows = read_csv(path)
    return MetricSeries(
        path.stem,
        tuple((parse_number(row["wallclock_s"]), parse_number(row["value"])) for row in rows),
    )


def write_join(path: str | Path, join: ComplexityErrorJoin) -> Path:
    return write_csv(
        path,
        ("window_start_s", "density", "mean_abs_error"),
        ((row.window_start_s, row.density, row.mean_abs_error) for row in join.rows),
    )
