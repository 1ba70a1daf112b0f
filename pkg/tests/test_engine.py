#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import pytest

from avnmp_engine.handlers.engine import (
    DrivingProcess,
    Engine,
    LogicalProcess,
    dp_observe,
    fossil_collect,
    lp_process,
    lp_rollback,
    lp_verify,
    query_prediction,
    run,
    run_conservative,
)
from avnmp_engine.handlers.exceptions import CausalityError, DomainError, RoutingError
from avnmp_engine.models.hypothesis import Hypothesis, TimedSample
from avnmp_engine.models.scenario import ScenarioConfig
from avnmp_engine.models.virtual_message import Sign, VerifyStatus, VirtualMessage


def message(recv_ts, value=100.0, id=None, dst="lp1", send_ts=0.0):
    return VirtualMessage(
        id=id or f"dp:{int(recv_ts):08d}",
        src="dp",
        dst=dst,
        send_ts=send_ts,
        recv_ts=recv_ts,
        value=value,
    )


@pytest.fixture
def lp() -> LogicalProcess:
    process = LogicalProcess("lp1", downstream="lp2", latency=1, window=200, step=20, budget=10)
    process.advance_wallclock(0)
    return process


def lvts(lp):
    return [entry.lvt for entry in lp.state_queue]


def test_virtual_message_rejects_receive_before_send():
    with pytest.raises(DomainError):
        message(5, send_ts=10)


def test_anti_message_twin():
    m = message(40)
    anti = m.anti()
    assert anti.is_anti and anti.sign is Sign.ANTI
    assert (anti.id, anti.recv_ts) == (m.id, m.recv_ts)
    assert anti.delivery_key() > m.delivery_key()


def test_driving_process_respects_the_window():
    dp = DrivingProcess("dp", "lp1", Hypothesis(1, 20), step=20, ratio=1, window=200)
    sent = []
    for t in range(40):
        sent.extend(dp_observe(dp, float(t), TimedSample(float(t), 100.0)))
        assert dp.lvt - t <= 200
    assert sent[0].send_ts == 0 and sent[0].recv_ts == 20 and sent[0].value == 100
    assert [m.recv_ts for m in sent] == [20.0 * k for k in range(1, len(sent) + 1)]
    assert len(sent) == 11


def test_driving_process_sample_must_match_wallclock():
    dp = DrivingProcess("dp", "lp1", Hypothesis(1, 20), step=20, ratio=1, window=200)
    with pytest.raises(DomainError):
        dp.observe(3.0, TimedSample(2.0, 1.0))


def test_driving_process_ratio_zero_is_silent():
    dp = DrivingProcess("dp", "lp1", Hypothesis(1, 20), step=20, ratio=0, window=200)
    assert dp.observe(0.0, TimedSample(0.0, 5.0)) == []


def test_driving_process_refresh_replaces_outstanding_predictions():
    dp = DrivingProcess("dp", "lp1", Hypothesis(1, 20), step=20, ratio=1, window=200)
    for t in range(5):
        dp.observe(float(t), TimedSample(float(t), 100.0))
    replaced = dp.refresh(4.0)
    antis = [m for m in replaced if m.is_anti]
    fresh = [m for m in replaced if not m.is_anti]
    assert len(antis) == len(fresh) == 5
    assert [m.recv_ts for m in antis] == [m.recv_ts for m in fresh]
    assert all(m.send_ts == 4.0 for m in fresh)


def test_in_order_processing_forwards_downstream(lp):
    out = lp_process(lp, message(40), 0)
    assert [(m.dst, m.send_ts, m.recv_ts) for m in out] == [("lp2", 40, 41)]
    assert lp.lvt == 40
    assert lvts(lp) == [40]


def test_wrong_destination(lp):
    with pytest.raises(RoutingError):
        lp.receive(message(40, dst="lp7"))


def test_straggler_rolls_back_and_cancels_later_sends(lp):
    lp.process(message(40), 0)
    lp.process(message(60), 0)

    antis = lp.receive(message(50))
    assert [(a.is_anti, a.send_ts) for a in antis] == [(True, 60)]
    assert lp.rollbacks == 1
    assert lp.lvt == 50
    assert [m.recv_ts for m in lp.input_queue] == [50, 60]

    lp.advance()
    assert lvts(lp) == [40, 50, 60]
    assert lp.input_queue == []


def test_anti_message_annihilates_pending_twin(lp):
    m = message(40)
    lp.receive(m)
    assert lp.receive(m.anti()) == []
    assert lp.input_queue == []
    assert lp.rollbacks == 0


def test_anti_message_retracts_processed_twin(lp):
    first, second = message(40), message(60)
    lp.process(first, 0)
    lp.process(second, 0)

    antis = lp.receive(second.anti())
    assert len(antis) == 1 and antis[0].is_anti and antis[0].send_ts == 60
    assert lvts(lp) == [40]
    assert [m.id for m in lp.processed] == [first.id]
    assert lp.input_queue == []


def test_anti_message_before_its_twin_waits_as_orphan(lp):
    m = message(40)
    assert lp.receive(m.anti()) == []
    assert lp.orphans == [m.anti()]
    lp.receive(m)
    assert lp.orphans == []
    assert lp.input_queue == []


def test_rollback_must_move_backwards(lp):
    lp.process(message(40), 0)
    with pytest.raises(DomainError):
        lp_rollback(lp, 40)
    antis = lp_rollback(lp, 30)
    assert len(antis) == 1
    assert lvts(lp) == []
    assert lp.lvt == 30


def test_verify_within_tolerance_commits(lp):
    lp.process(message(20, value=100.0), 0)
    lp.advance_wallclock(20)
    assert lp_verify(lp, 110.0, 20) is VerifyStatus.IN_TOLERANCE
    assert lp.state_queue[0].committed
    assert query_prediction(lp, 25) == 100.0
    assert query_prediction(lp, 31) is None


def test_query_prefers_nearest_then_earlier(lp):
    lp.process(message(40, value=1.0), 0)
    lp.process(message(50, value=2.0), 0)
    assert query_prediction(lp, 44) == 1.0
    assert query_prediction(lp, 45) == 1.0
    assert query_prediction(lp, 46) == 2.0


def test_verify_out_of_tolerance_rolls_back_and_reprimes(lp):
    lp.process(message(20, value=100.0), 0)
    lp.process(message(40, value=200.0), 0)
    lp.advance_wallclock(20)

    result = lp.verify(1000.0, 20, tolerance=500)
    assert result.status is VerifyStatus.OUT_OF_TOLERANCE
    assert result.error == 100.0 - 1000.0
    assert len(result.antis) == 1 and result.antis[0].send_ts == 40
    assert lp.rollbacks == 1

    entry = lp.state_queue[0]
    assert (entry.lvt, entry.value, entry.committed) == (20, 1000.0, True)
    assert [m.recv_ts for m in lp.input_queue] == [40]

    with pytest.raises(CausalityError):
        lp.rollback(10)


def test_verify_without_prediction_reprimes_only(lp):
    lp.advance_wallclock(5)
    result = lp.verify(42.0, 5)
    assert result.status is VerifyStatus.OUT_OF_TOLERANCE
    assert result.predicted is None and result.error is None
    assert lp.rollbacks == 0
    assert lp.query_prediction(5) == 42.0


def test_fossil_collection_frees_old_state(lp):
    for t in (20, 40, 60):
        lp.process(message(t), 0)
    lp.advance_wallclock(60)
    assert lp.event_cost() > 1.0
    assert lp.fossil_collect(60) == 2
    assert lvts(lp) == [40, 60]
    assert lp.event_cost() == 1.0


def small_scenario(**overrides) -> ScenarioConfig:
    fields = dict(nodes=4, duration=900, seed=0)
    fields.update(overrides)
    return ScenarioConfig(**fields)


def test_lookahead_never_exceeds_the_window():
    trace = run(small_scenario(duration=400))
    window = trace.scenario.sliding_window
    for event in trace.of_type("snapshot"):
        assert event.ts - event.tick <= window


@pytest.mark.parametrize("seed", range(20))
def test_committed_state_matches_sequential_execution(seed):
    scenario = small_scenario(seed=seed)
    trace = run(scenario)
    oracle = run_conservative(trace)
    settled = (scenario.ticks - 1) * scenario.tick - scenario.step

    committed = trace.committed()
    assert any(committed.values())
    for lp_id, pairs in committed.items():
        expected = [(ts, value) for ts, value in oracle[lp_id] if ts <= settled]
        actual = [(ts, value) for ts, value in pairs if ts <= settled]
        assert [ts for ts, _ in actual] == [ts for ts, _ in expected]
        assert [value for _, value in actual] == pytest.approx(
            [value for _, value in expected], abs=1e-9
        )


def test_reference_run_rolls_back():
    trace = run(small_scenario(seed=3, tolerance_start=100))
    assert trace.counters["rollbacks"] > 0
    assert trace.counters["anti_messages"] > 0


def test_infinite_tolerance_on_linear_load_never_rolls_back():
    trace = run(small_scenario(workload="linear", tolerance_start=float("inf"), duration=600))
    assert trace.counters["rollbacks"] == 0
    observed = trace.scenario.observed
    lookahead = [e.ts - e.tick for e in trace.of_type("snapshot") if e.src == observed]
    assert max(lookahead) <= trace.scenario.sliding_window
    assert lookahead[-1] > trace.scenario.sliding_window / 2


def test_engine_fossil_collection_switch():
    on = Engine(small_scenario(duration=120))
    on.run()
    assert on.counters["freed"] > 0

    off = Engine(small_scenario(duration=120, fossil_collection=False))
    off.run()
    assert fossil_collect(off) == 0
    assert off.counters["freed"] == 0


def test_same_seed_same_trace():
    first = run(small_scenario(duration=300, seed=11))
    second = run(small_scenario(duration=300, seed=11))
    assert [e.to_dict() for e in first.events] == [e.to_dict() for e in second.events]
