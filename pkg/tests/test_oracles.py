import numpy as np
import pytest

from src import oracles
from src.bounds import CheckBounds
from src.errors import PreconditionViolation
from src.explorer import explore
from src.generators import GenerationLimits, random_typable_sessions
from src.message_queue import EMPTY_QUEUE
from src.oracles import (
    cross_check_session_fidelity,
    cross_check_subject_reduction,
    cross_check_type_progress,
    fuzz_satisfaction_preservation,
    satisfaction_violation,
    walk_for_unsatisfaction,
)
from src.properties import PropertyStatus
from src.session import enabled_labels, run_trace, step
from src.terms import CommLabel
from src.type_checker import CheckMemo, check


def test_client_server_lockstep(client_server):
    g, s = client_server.globals["G_cs"], client_server.sessions["CS"]
    reduction = cross_check_subject_reduction(g, s)
    assert reduction.holds
    assert reduction.coverage.states > 1
    assert cross_check_session_fidelity(g, s).holds


def test_client_server_type_progress(client_server):
    assert cross_check_type_progress(client_server.globals["G_cs"], EMPTY_QUEUE).holds


def test_type_progress_detects_starved_player(load):
    g = load("global G = p q ! l . G + r s ! l . End").globals["G"]
    assert cross_check_type_progress(g, EMPTY_QUEUE).holds

    starved = load("global H = q p ? l . r s ! l . End").globals["H"]
    verdict = cross_check_type_progress(starved, EMPTY_QUEUE)
    assert verdict.status is PropertyStatus.FAILS


def test_cross_check_needs_a_typing(corpus):
    program = corpus.programs["client_server_workers.mps"]
    with pytest.raises(PreconditionViolation):
        cross_check_subject_reduction(program.globals["G_workers"], program.sessions["Workers"])


def test_lockstep_holds_on_random_typable_sessions():
    rng = np.random.default_rng(11)
    bounds = CheckBounds(max_visited=5_000, max_queue=4)
    limits = GenerationLimits(max_participants=3, max_depth=4)
    decided = 0
    for session, g in random_typable_sessions(rng, 50, limits=limits, bounds=bounds):
        assert check(g, session, bounds).accepted
        # the walk fires every session label, so it needs the whole reachable space in bounds
        if explore(session, bounds.exploration()).truncated:
            continue
        decided += 1
        assert cross_check_subject_reduction(g, session, bounds).holds
        assert cross_check_session_fidelity(g, session, bounds).holds
    assert decided >= 10


def test_lockstep_reuses_typed_pairs(client_server):
    g, s = client_server.globals["G_cs"], client_server.sessions["CS"]
    memo = CheckMemo()
    first = check(g, s, memo=memo)
    assert first.accepted and len(memo) == first.stats.visited
    again = check(g, s, memo=memo)
    assert again.accepted
    assert again.stats.visited == 0
    assert memo.hits == 1


def test_satisfaction_violation_is_none_for_own_steps(client_server):
    inflight = client_server.sessions["CS_inflight"]
    assert satisfaction_violation(inflight, CommLabel.input("s", "c", "req")) is None
    assert satisfaction_violation(inflight, CommLabel.input("c", "s", "res")) is None


def test_satisfaction_preservation_fuzz():
    verdict = fuzz_satisfaction_preservation(seed=42, count=1000)
    assert verdict.holds
    assert verdict.coverage.states > 0


def test_client_server_workers_subject_reduction(corpus):
    program = corpus.programs["client_server_workers.mps"]
    verdict = cross_check_subject_reduction(program.globals["G_workers_alt"], program.sessions["Workers"])
    assert verdict.holds


def test_unsatisfaction_trace_leads_to_reported_state(client_server, monkeypatch):
    cs = client_server.sessions["CS"]
    # flag the first label tested after the walk has moved
    monkeypatch.setattr(oracles, "satisfaction_violation", lambda session, label: "s" if session != cs else None)
    tested, violation = walk_for_unsatisfaction(cs, np.random.default_rng(0), 6)
    assert violation is not None
    trace, state, label, victim = violation
    assert victim == "s"
    assert len(trace) == 1
    assert run_trace(cs, trace) == state
    assert step(state, label) is not None
    assert tested == len(enabled_labels(cs)) + 1


def test_mismatched_memo_mode(client_server):
    with pytest.raises(ValueError):
        check(client_server.globals["G_cs"], client_server.sessions["CS"], sound_mode=True, memo=CheckMemo())


# ── Corpus typings ───────────────────────────────────────────────────────

def test_corpus_typings(corpus):
    typed = set()
    for file_name, g_name, s_name in corpus.declared_checks():
        program = corpus.programs[file_name]
        if check(program.globals[g_name], program.sessions[s_name]).accepted:
            typed.add((g_name, s_name))
    assert typed == {
        ("G_cs", "CS"),
        ("G_Exchange", "Exchange"),
        ("G_timeout", "TimeOut"),
        ("G_timeout_alt", "TimeOut"),
        ("G_workers_alt", "Workers"),
    }


def test_lockstep_holds_on_corpus_typings(typed_pair):
    g, s = typed_pair
    assert not explore(s, CheckBounds().exploration()).truncated
    assert cross_check_subject_reduction(g, s).holds
    assert cross_check_session_fidelity(g, s).holds
