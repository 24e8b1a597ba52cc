import numpy as np
import pytest

from src.errors import TraceError
from src.generators import random_session
from src.message_queue import Queue
from src.session import (
    coherent_sets,
    enabled_for,
    enabled_labels,
    is_satisfied,
    run_trace,
    run_trace_checked,
    step,
)
from src.terms import CommLabel, parse_trace

CS_REQ = CommLabel.output("c", "s", "req")
SC_HALT = CommLabel.output("s", "c", "halt")
SC_READ_REQ = CommLabel.input("s", "c", "req")


def test_enabled_labels(client_server):
    cs = client_server.sessions["CS"]
    assert enabled_labels(cs) == frozenset({CS_REQ, SC_HALT})
    assert enabled_for("c", cs) == frozenset({CS_REQ})
    assert enabled_for("s", cs) == frozenset({SC_HALT})
    assert enabled_for("nobody", cs) == frozenset()


def test_satisfaction(client_server, counterexamples):
    cs = client_server.sessions["CS"]
    assert is_satisfied("c", cs)
    assert not is_satisfied("s", cs)
    assert is_satisfied("s", client_server.sessions["CS_inflight"])
    assert not is_satisfied("q", counterexamples.sessions["Stuck"])


def test_coherent_sets_order(client_server):
    cs = client_server.sessions["CS"]
    assert coherent_sets(cs) == [frozenset({CS_REQ}), frozenset({CS_REQ, SC_HALT})]


def test_coherent_sets_of_stuck_session(counterexamples):
    stuck = counterexamples.sessions["Stuck"]
    assert enabled_labels(stuck) == frozenset()
    assert coherent_sets(stuck) == []


def test_output_step(client_server):
    cs = client_server.sessions["CS"]
    after = step(cs, CS_REQ)
    assert after.queue.channel("c", "s") == ("req",)
    assert after.network.process_of("s") is cs.network.process_of("s")
    assert step(cs, CS_REQ) == after


def test_undefined_steps(client_server):
    cs = client_server.sessions["CS"]
    assert step(cs, SC_READ_REQ) is None
    assert step(cs, CommLabel.output("x", "s", "req")) is None
    assert step(cs, CommLabel.output("c", "s", "other")) is None


def test_trace_closes_the_loop(client_server):
    cs = client_server.sessions["CS"]
    loop = parse_trace("c>s!req,s<c?req,s>c!res,c<s?res")
    assert run_trace(cs, loop) == cs


def test_trace_error_index(client_server):
    cs = client_server.sessions["CS"]
    with pytest.raises(TraceError) as info:
        run_trace_checked(cs, parse_trace("c>s!req,c>s!req"))
    assert info.value.index == 1
    assert run_trace(cs, [SC_READ_REQ]) is None


def test_final_session_with_orphans(counterexamples):
    orphan = counterexamples.sessions["Orphan"]
    assert orphan.is_final
    assert orphan.queue == Queue.from_messages(orphan.queue.messages())
    assert enabled_labels(orphan) == frozenset()


def test_step_and_coherence_invariants_on_random_sessions():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        s = random_session(rng)
        enabled = enabled_labels(s)
        for p in s.plays:
            for prefix, _ in s.network.process_of(p).branches:
                label = CommLabel.of(p, prefix)
                assert (label in enabled) == (step(s, label) is not None)
        sets = coherent_sets(s)
        assert all(labels <= enabled for labels in sets)
        if enabled:
            assert sets[-1] == enabled
        else:
            assert sets == []
