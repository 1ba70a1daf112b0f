#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import heapq
import logging
import math
from bisect import bisect_left, bisect_right, insort
from collections import deque
from itertools import count
from typing import Any, Callable, Deque, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..models.hypothesis import Hypothesis, TimedSample
from ..models.scenario import ScenarioConfig
from ..models.trace import EventTrace, TraceEvent
from ..models.virtual_message import (
    SavedSend,
    Sign,
    StateEntry,
    VerifyResult,
    VerifyStatus,
    VirtualMessage,
)
from .exceptions import (
    AVNMPError,
    CausalityError,
    ConfigurationError,
    DomainError,
    RoutingError,
)
from .mdl import extrapolate
from .workload import build_workload

Model = Callable[[float], float]
Recorder = Callable[..., None]

DP_ID = "dp"
REAL_CAUSE = "real"


def identity(value: float) -> float:
    return value


def _ignore(*args: Any, **kwargs: Any) -> None:
    return None


def _lvt(entry: StateEntry) -> float:
    return entry.lvt


def _recv_ts(message: VirtualMessage) -> float:
    return message.recv_ts


def _send_ts(send: SavedSend) -> float:
    return send.message.send_ts


class DrivingProcess:
    """Edge process: turns real observations into virtual messages for one LP."""

    def __init__(
        self,
        dp_id: str,
        dst: str,
        hypothesis: Hypothesis,
        step: float,
        ratio: int,
        window: float,
        cap: int | None = None,
        history: Iterable[TimedSample] = (),
    ) -> None:
        if not step > 0:
            raise DomainError("driving process step must be positive")
        if ratio < 0:
            raise DomainError("virtual/real ratio must not be negative")

        self.id = dp_id
        self.dst = dst
        self.hypothesis = hypothesis
        self.step = step
        self.ratio = ratio
        self.window = window
        self.cap = ratio if cap is None else cap
        self.lvt = 0.0
        self.history: Deque[TimedSample] = deque(history, maxlen=hypothesis.w + 1)
        self.outstanding: Dict[float, VirtualMessage] = {}
        self._seq = count(1)

    def _message(self, send_ts: float, recv_ts: float, value: float) -> VirtualMessage:
        message = VirtualMessage(
            id=f"{self.id}:{next(self._seq):08d}",
            src=self.id,
            dst=self.dst,
            send_ts=send_ts,
            recv_ts=recv_ts,
            value=value,
        )
        self.outstanding[recv_ts] = message
        return message

    def _forget(self, wallclock: float) -> None:
        for ts in [ts for ts in self.outstanding if ts <= wallclock]:
            del self.outstanding[ts]

    def observe(self, wallclock: float, sample: TimedSample) -> List[VirtualMessage]:
        if not math.isclose(sample.t, wallclock, abs_tol=1e-9):
            raise DomainError(f"sample at {sample.t}s observed at wallclock {wallclock}s")

        self.history.append(sample)
        self.lvt = max(self.lvt, wallclock)
        self._forget(wallclock)

        sent: List[VirtualMessage] = []
        for _ in range(min(self.ratio, self.cap)):
            recv_ts = self.lvt + self.step
            if recv_ts > wallclock + self.window:
                break
            (predicted,) = extrapolate(self.hypothesis, list(self.history), [recv_ts])
            sent.append(self._message(self.lvt, recv_ts, predicted.value))
            self.lvt = recv_ts
        return sent

    def refresh(self, wallclock: float) -> List[VirtualMessage]:
        """Cancel predictions beyond wallclock and re-send them from the current history."""
        self._forget(wallclock)
        stale = sorted(self.outstanding)
        if not stale:
            return []

        antis = [self.outstanding[ts].anti() for ts in stale]
        predictions = extrapolate(self.hypothesis, list(self.history), stale)
        fresh = [self._message(wallclock, p.t, p.value) for p in predictions]
        return antis + fresh


class LogicalProcess:
    """Per-node Time Warp process holding the State Queue of predicted values."""

    def __init__(
        self,
        lp_id: str,
        downstream: str | None = None,
        latency: float = 1.0,
        window: float = 200.0,
        step: float = 20.0,
        budget: int = 4,
        tolerance: float = 500.0,
        model: Model | None = None,
        record: Recorder | None = None,
        logger: logging.Logger | None = None,
    ) -> None:
        self.id = lp_id
        self.downstream = downstream
        self.latency = latency
        self.window = window
        self.step = step
        self.budget = budget
        self.tolerance = tolerance
        self.model = model or identity
        self.lvt = 0.0
        self.wallclock = 0.0
        self.state_queue: List[StateEntry] = []
        self.processed: List[VirtualMessage] = []
        self.saved_sends: List[SavedSend] = []
        self.commit_horizon = -math.inf
        self.rollbacks = 0
        self.events_processed = 0

        self._pending: Dict[str, VirtualMessage] = {}
        self._heap: List[Tuple[float, str, str, int, VirtualMessage]] = []
        self._orphans: Dict[str, VirtualMessage] = {}
        self._push_seq = count()
        self._send_seq = count(1)
        self._remaining = budget
        self._record = record or _ignore
        self._logger = logger or logging.getLogger(__name__)

    # Queues -----------------------------------------------------------------

    @property
    def input_queue(self) -> List[VirtualMessage]:
        return sorted(self._pending.values(), key=lambda m: (m.recv_ts, m.src, m.id))

    @property
    def orphans(self) -> List[VirtualMessage]:
        return list(self._orphans.values())

    def _enqueue(self, message: VirtualMessage) -> None:
        self._pending[message.id] = message
        heapq.heappush(
            self._heap,
            (message.recv_ts, message.src, message.id, next(self._push_seq), message),
        )

    def advance_wallclock(self, wallclock: float) -> None:
        self.wallclock = wallclock
        self.lvt = max(self.lvt, wallclock)
        self._remaining = self.budget

    # Message handling ---------------------------------------------------------

    def receive(self, message: VirtualMessage) -> List[VirtualMessage]:
        if message.dst != self.id:
            raise RoutingError(f"message {message.id} for {message.dst} delivered to {self.id}")

        if message.is_anti:
            return self._annihilate(message)

        if self._orphans.pop(message.id, None) is not None:
            return []

        antis = self._rollback(message.recv_ts) if message.recv_ts < self.lvt else []
        self._enqueue(message)
        return antis

    def _annihilate(self, anti: VirtualMessage) -> List[VirtualMessage]:
        if self._pending.pop(anti.id, None) is not None:
            return []

        for twin in reversed(self.processed):
            if twin.id == anti.id:
                return self._retract(twin)

        self._logger.warning(f"{self.id}: anti-message {anti.id} arrived without a twin")
        self._orphans[anti.id] = anti
        return []

    def _retract(self, twin: VirtualMessage) -> List[VirtualMessage]:
        antis = self._rollback(twin.recv_ts)

        # After the rollback the twin and everything it produced sit at the tail.
        for index in range(len(self.processed) - 1, -1, -1):
            if self.processed[index].id == twin.id:
                del self.processed[index]
                break

        for index in range(len(self.state_queue) - 1, -1, -1):
            entry = self.state_queue[index]
            if entry.lvt < twin.recv_ts:
                break
            if entry.cause == twin.id:
                if entry.committed:
                    raise CausalityError(f"{self.id}: anti-message {twin.id} hits a committed entry")
                del self.state_queue[index]
                break

        start = bisect_left(self.saved_sends, twin.recv_ts, key=_send_ts)
        tail = self.saved_sends[start:]
        antis.extend(send.message.anti() for send in tail if send.cause == twin.id)
        self.saved_sends[start:] = [send for send in tail if send.cause != twin.id]

        last = self.processed[-1].recv_ts if self.processed else self.wallclock
        self.lvt = max(self.wallclock, last)
        return antis

    def advance(self, unlimited: bool = False) -> List[VirtualMessage]:
        """Execute pending inputs in timestamp order within the tick budget and window."""
        emitted: List[VirtualMessage] = []

        while self._heap:
            recv_ts, _, message_id, _, message = self._heap[0]
            if self._pending.get(message_id) is not message:
                heapq.heappop(self._heap)
                continue
            if recv_ts > self.wallclock + self.window:
                break
            overdue = recv_ts <= self.wallclock
            if self._remaining <= 0 and not (overdue or unlimited):
                break

            heapq.heappop(self._heap)
            del self._pending[message_id]
            emitted.extend(self._execute(message))
            self._remaining -= 1

        return emitted

    def _execute(self, message: VirtualMessage) -> List[VirtualMessage]:
        entry = StateEntry(message.recv_ts, self.model(message.value), cause=message.id)
        insort(self.state_queue, entry, key=_lvt)
        self.lvt = max(self.lvt, message.recv_ts)
        self.processed.append(message)
        self.events_processed += 1
        self._record("process", src=self.id, ts=message.recv_ts, value=self.event_cost())

        if self.downstream is None:
            return []

        forward = VirtualMessage(
            id=f"{self.id}:{next(self._send_seq):08d}",
            src=self.id,
            dst=self.downstream,
            send_ts=message.recv_ts,
            recv_ts=message.recv_ts + self.latency,
            value=entry.value,
        )
        self.saved_sends.append(SavedSend(forward, message.id))
        return [forward]

    def process(self, message: VirtualMessage, wallclock: float) -> List[VirtualMessage]:
        """Receive and execute immediately, ignoring the per-tick budget."""
        self.wallclock = wallclock
        emitted = self.receive(message)
        emitted.extend(self.advance(unlimited=True))
        return emitted

    # Rollback -----------------------------------------------------------------

    def rollback(self, to_time: float) -> List[VirtualMessage]:
        if not to_time < self.lvt:
            raise DomainError(f"{self.id}: rollback to {to_time} is not before lvt {self.lvt}")
        return self._rollback(to_time)

    def _rollback(self, to_time: float) -> List[VirtualMessage]:
        if to_time < self.commit_horizon:
            raise CausalityError(
                f"{self.id}: rollback to {to_time} crosses the commit horizon {self.commit_horizon}"
            )

        cut = bisect_right(self.state_queue, to_time, key=_lvt)
        del self.state_queue[cut:]

        cut = bisect_right(self.processed, to_time, key=_recv_ts)
        for message in self.processed[cut:]:
            self._enqueue(message)
        del self.processed[cut:]

        cut = bisect_right(self.saved_sends, to_time, key=_send_ts)
        antis = [send.message.anti() for send in self.saved_sends[cut:]]
        del self.saved_sends[cut:]

        self.lvt = to_time
        self.rollbacks += 1
        self._record("rollback", src=self.id, ts=to_time, value=float(len(antis)))
        return antis

    # State Queue ----------------------------------------------------------------

    def nearest_entry(self, t: float) -> Optional[StateEntry]:
        half = self.step / 2
        low = bisect_left(self.state_queue, t - half, key=_lvt)
        high = bisect_right(self.state_queue, t + half, key=_lvt)
        candidates = self.state_queue[low:high]
        if not candidates:
            return None
        return min(candidates, key=lambda entry: (abs(entry.lvt - t), entry.lvt))

    def query_prediction(self, t: float) -> Optional[float]:
        entry = self.nearest_entry(t)
        return None if entry is None else entry.value

    def _commit(self, entry: StateEntry) -> None:
        entry.committed = True
        self.commit_horizon = max(self.commit_horizon, entry.lvt)
        self._record("commit", src=self.id, ts=entry.lvt, value=entry.value)

    def _commit_through(self, t: float) -> None:
        for entry in self.state_queue[: bisect_right(self.state_queue, t, key=_lvt)]:
            if not entry.committed:
                self._commit(entry)

    def _install_real(self, wallclock: float, real: float) -> None:
        entry = StateEntry(wallclock, real, committed=True, cause=REAL_CAUSE)
        index = bisect_left(self.state_queue, wallclock, key=_lvt)
        if index < len(self.state_queue) and self.state_queue[index].lvt == wallclock:
            self.state_queue[index] = entry
        else:
            self.state_queue.insert(index, entry)

        self.commit_horizon = max(self.commit_horizon, wallclock)
        self.lvt = max(self.lvt, wallclock)
        self._record("reprime", src=self.id, ts=wallclock, value=real)
        self._record("commit", src=self.id, ts=wallclock, value=real)

    def verify(
        self, real: float, wallclock: float, tolerance: float | None = None
    ) -> VerifyResult:
        self.wallclock = wallclock
        if tolerance is not None:
            self.tolerance = tolerance
        tolerance = self.tolerance
        entry = self.nearest_entry(wallclock)

        if entry is not None and abs(real - entry.value) <= tolerance:
            # A verified instant settles every entry up to it.
            self._commit_through(wallclock)
            return VerifyResult(VerifyStatus.IN_TOLERANCE, entry.value, real)

        # A missing prediction is re-primed without rolling anything back.
        antis: List[VirtualMessage] = []
        if entry is not None and self.lvt > wallclock:
            antis = self._rollback(wallclock)
        self._install_real(wallclock, real)
        self._commit_through(wallclock)

        return VerifyResult(
            VerifyStatus.OUT_OF_TOLERANCE,
            None if entry is None else entry.value,
            real,
            tuple(antis),
        )

    # Fossil collection -----------------------------------------------------------

    def stale_count(self, horizon: float) -> int:
        return (
            bisect_left(self.state_queue, horizon, key=_lvt)
            + bisect_left(self.processed, horizon, key=_recv_ts)
            + bisect_left(self.saved_sends, horizon, key=_send_ts)
        )

    def event_cost(self) -> float:
        """Relative cost of one event: grows with state older than wallclock - step."""
        stale = self.stale_count(self.wallclock - self.step)
        return 1.0 + stale / (self.window / self.step)

    def fossil_collect(self, gvt: float) -> int:
        horizon = gvt - self.step
        entries = bisect_left(self.state_queue, horizon, key=_lvt)
        inputs = bisect_left(self.processed, horizon, key=_recv_ts)
        sends = bisect_left(self.saved_sends, horizon, key=_send_ts)

        del self.state_queue[:entries]
        del self.processed[:inputs]
        del self.saved_sends[:sends]
        for message_id in [i for i, m in self._orphans.items() if m.recv_ts < horizon]:
            del self._orphans[message_id]
        return entries + sends


class Engine:
    def __init__(
        self,
        scenario: ScenarioConfig,
        logger: logging.Logger | None = None,
        workload: Sequence[float] | np.ndarray | None = None,
        trace_samples: Sequence[TimedSample] | None = None,
        model: Model | None = None,
    ) -> None:
        self.scenario = scenario
        self.logger = logger or logging.getLogger(__name__)
        self.model = model or identity

        if workload is None:
            rng = np.random.default_rng(scenario.seed)
            workload = build_workload(scenario, rng, trace_samples)
        self.workload = np.asarray(workload, dtype=float)
        if len(self.workload) < scenario.ticks:
            raise ConfigurationError(
                f"workload holds {len(self.workload)} samples, run needs {scenario.ticks}"
            )

        lp_ids = scenario.lp_ids
        self.trace = EventTrace(
            scenario=scenario,
            lp_ids=lp_ids,
            workload=[float(v) for v in self.workload[: scenario.ticks]],
        )
        self.wallclock = 0.0
        self.tolerance = scenario.tolerance_start
        self._tick = 0
        self._heap: List[Tuple[Tuple[float, str, str, int], int, VirtualMessage]] = []
        self._push_seq = count()
        self.counters: Dict[str, int] = {
            "virtual_messages": 0,
            "anti_messages": 0,
            "reprimes": 0,
            "freed": 0,
        }

        self.dp = DrivingProcess(
            DP_ID,
            lp_ids[0],
            Hypothesis(scenario.smoothing_window, scenario.step),
            scenario.step,
            scenario.virtual_real_ratio,
            scenario.sliding_window,
            cap=scenario.emission_cap(),
        )
        self.lps: Dict[str, LogicalProcess] = {}
        for index, lp_id in enumerate(lp_ids):
            self.lps[lp_id] = LogicalProcess(
                lp_id,
                downstream=lp_ids[index + 1] if index + 1 < len(lp_ids) else None,
                latency=scenario.link_latency,
                window=scenario.sliding_window,
                step=scenario.step,
                budget=scenario.lp_events_per_tick,
                tolerance=scenario.tolerance_start,
                model=self.model,
                record=self._record,
                logger=self.logger,
            )

    def _record(self, type: str, **fields: Any) -> None:
        self.trace.events.append(TraceEvent(self._tick, type, **fields))

    def _send(self, messages: Iterable[VirtualMessage]) -> None:
        for message in messages:
            heapq.heappush(self._heap, (message.delivery_key(), next(self._push_seq), message))
            self._record(
                "message",
                src=message.src,
                dst=message.dst,
                ts=message.recv_ts,
                value=message.value,
                sign=message.sign.value,
            )
            self.counters["anti_messages" if message.is_anti else "virtual_messages"] += 1

    def _deliver(self) -> None:
        while True:
            while self._heap:
                _, _, message = heapq.heappop(self._heap)
                if message.dst not in self.lps:
                    raise RoutingError(f"no logical process '{message.dst}'")
                self._send(self.lps[message.dst].receive(message))

            for lp in self.lps.values():
                self._send(lp.advance())

            if not self._heap:
                return

    def real_value(self, position: int, wallclock: float) -> float:
        """Observed load at the position-th LP: the workload delayed one latency per hop."""
        t = wallclock - position * self.scenario.link_latency
        index = int(math.floor(t / self.scenario.tick + 1e-9))
        return float(self.workload[min(max(index, 0), len(self.workload) - 1)])

    def fossil_collect(self, gvt: float | None = None) -> int:
        if not self.scenario.fossil_collection:
            return 0

        gvt = self.wallclock if gvt is None else gvt
        freed = 0
        for lp in self.lps.values():
            count_freed = lp.fossil_collect(gvt)
            if count_freed:
                self._record("fossil", src=lp.id, ts=gvt, value=float(count_freed))
            freed += count_freed
        self.counters["freed"] += freed
        return freed

    def step(self, tick: int) -> None:
        scenario = self.scenario
        self._tick = tick
        self.wallclock = wallclock = tick * scenario.tick

        for lp in self.lps.values():
            lp.advance_wallclock(wallclock)
        self.fossil_collect(wallclock)

        tolerance = scenario.tolerance_at(wallclock)
        if tick == 0 or tolerance != self.tolerance:
            self.tolerance = tolerance
            self._record("tolerance", ts=wallclock, value=tolerance)

        sample = TimedSample(wallclock, float(self.workload[tick]))
        self._send(self.dp.observe(wallclock, sample))
        self._deliver()

        refresh = False
        for position, lp in enumerate(self.lps.values()):
            result = lp.verify(self.real_value(position, wallclock), wallclock, tolerance)
            self._record(
                "verify",
                src=lp.id,
                ts=wallclock,
                value=result.error,
                sign=result.status.value,
            )
            self._send(result.antis)
            if result.status is VerifyStatus.OUT_OF_TOLERANCE and result.predicted is not None:
                refresh = True

        if refresh:
            self.counters["reprimes"] += 1
            self._send(self.dp.refresh(wallclock))
        self._deliver()

        for lp in self.lps.values():
            self._record("snapshot", src=lp.id, ts=lp.lvt, value=float(len(lp.state_queue)))

    def run(self) -> EventTrace:
        scenario = self.scenario
        self.logger.info(
            f"Running {scenario.ticks} ticks over {len(self.lps)} logical processes "
            f"(seed {scenario.seed}, fossil collection {'on' if scenario.fossil_collection else 'off'})"
        )
        try:
            for tick in range(scenario.ticks):
                self.step(tick)
        except AVNMPError as e:
            self.logger.exception(f"Run aborted at tick {self._tick}: {e}")
            raise

        for lp in self.lps.values():
            self.counters[f"rollbacks:{lp.id}"] = lp.rollbacks
            self.counters[f"events:{lp.id}"] = lp.events_processed
        self.counters["rollbacks"] = sum(lp.rollbacks for lp in self.lps.values())
        self.trace.counters = dict(self.counters)
        self.trace.completed = True

        self.logger.info(
            f"Run complete: {self.counters['virtual_messages']} virtual messages, "
            f"{self.counters['anti_messages']} anti-messages, "
            f"{self.counters['rollbacks']} rollbacks"
        )
        return self.trace


def run(scenario: ScenarioConfig, logger: logging.Logger | None = None, **kwargs: Any) -> EventTrace:
    return Engine(scenario, logger=logger, **kwargs).run()


def run_conservative(
    trace: EventTrace, model: Model | None = None
) -> Dict[str, List[Tuple[float, float]]]:
    """
    Sequential replay without rollbacks: every surviving Driving Process message
    flows down the chain in timestamp order, and observed values re-primed at a
    node overwrite the prediction held for the same instant.
    """
    model = model or identity
    scenario = trace.scenario

    live: Dict[float, float] = {}
    for event in trace.of_type("message"):
        if event.src != DP_ID:
            continue
        if event.sign == Sign.POSITIVE.value:
            live[event.ts] = event.value
        else:
            live.pop(event.ts, None)

    reprimes: Dict[str, List[Tuple[float, float]]] = {lp_id: [] for lp_id in trace.lp_ids}
    for event in trace.of_type("reprime"):
        reprimes[event.src].append((event.ts, event.value))

    result: Dict[str, List[Tuple[float, float]]] = {}
    arrivals = sorted(live.items())
    for lp_id in trace.lp_ids:
        executed = [(ts, 0, model(value)) for ts, value in arrivals]
        executed.extend((ts, 1, value) for ts, value in reprimes[lp_id])

        state: Dict[float, float] = {}
        for ts, _, value in sorted(executed):
            state[ts] = value
        result[lp_id] = sorted(state.items())

        arrivals = [(ts + scenario.link_latency, model(value)) for ts, value in arrivals]

    return result


# Operation-level entry points -------------------------------------------------------


def dp_observe(dp: DrivingProcess, wallclock: float, sample: TimedSample) -> List[VirtualMessage]:
    return dp.observe(wallclock, sample)


def lp_process(lp: LogicalProcess, m: VirtualMessage, wallclock: float) -> List[VirtualMessage]:
    return lp.process(m, wallclock)


def lp_rollback(lp: LogicalProcess, to_time: float) -> List[VirtualMessage]:
    return lp.rollback(to_time)


def lp_verify(lp: LogicalProcess, real_value: float, wallclock: float) -> VerifyStatus:
    return lp.verify(real_value, wallclock).status


def query_prediction(lp: LogicalProcess, t: float) -> Optional[float]:
    return lp.query_prediction(t)


def fossil_collect(engine: Engine) -> int:
    return engine.fossil_collect()
