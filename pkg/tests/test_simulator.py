import numpy as np
import pytest

from src.errors import TraceError
from src.generators import GenerationLimits, guided_session, random_session
from src.session import enabled_labels, run_trace
from src.simulator import random_schedule, replay
from src.terms import parse_trace


def test_random_schedule_replays(client_server):
    cs = client_server.sessions["CS"]
    trace = random_schedule(cs, 4, seed=42)
    assert len(trace) <= 4
    assert run_trace(cs, trace) is not None
    assert random_schedule(cs, 4, seed=42) == trace


def test_schedule_stops_when_nothing_is_enabled(counterexamples):
    assert random_schedule(counterexamples.sessions["Stuck"], 10, seed=1) == ()


def test_negative_steps(client_server):
    with pytest.raises(ValueError):
        random_schedule(client_server.sessions["CS"], -1)


def test_replay_states(client_server):
    cs = client_server.sessions["CS"]
    states = replay(cs, parse_trace("c>s!req,s<c?req,s>c!res,c<s?res"))
    assert len(states) == 5
    assert states[0] == cs and states[-1] == cs


def test_replay_reports_index(client_server):
    with pytest.raises(TraceError) as info:
        replay(client_server.sessions["CS"], parse_trace("c>s!req,c<s?res"))
    assert info.value.index == 1


# ── Generators ───────────────────────────────────────────────────────────

def test_generators_are_seeded():
    a = random_session(np.random.default_rng(3))
    b = random_session(np.random.default_rng(3))
    assert sorted(map(str, enabled_labels(a))) == sorted(map(str, enabled_labels(b)))
    assert a.queue == b.queue


def test_guided_sessions_respect_limits():
    rng = np.random.default_rng(5)
    limits = GenerationLimits(max_participants=3, max_tags=2)
    for _ in range(200):
        session = guided_session(rng, limits)
        assert session.queue.is_empty
        assert session.plays <= {"p", "q", "r"}


def test_generation_limits_validation():
    with pytest.raises(ValueError):
        GenerationLimits(max_participants=1)
