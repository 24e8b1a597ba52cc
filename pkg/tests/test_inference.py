import numpy as np
import pytest

from src.bounds import CheckBounds
from src.generators import GenerationLimits, random_typable_sessions
from src.inference import infer
from src.terms import CommLabel, GlobalNode, bisim_equal
from src.type_checker import Reason, Status, check


def test_client_server_round_trip(client_server):
    inferred = infer(client_server.sessions["CS"], strategy="satisfied-first")
    assert isinstance(inferred, GlobalNode)
    assert bisim_equal(inferred, client_server.globals["G_cs"])


@pytest.mark.parametrize("strategy", ["satisfied-first", "full-set-only"])
def test_independent_reads(corpus, strategy):
    session = corpus.programs["asynchrony.mps"].sessions["Independent"]
    inferred = infer(session, strategy=strategy)
    assert isinstance(inferred, GlobalNode)
    assert check(inferred, session).accepted

    first, second = CommLabel.input("p", "q", "l"), CommLabel.input("r", "s", "l2")
    if strategy == "satisfied-first":
        assert inferred.keys() == [first]
    else:
        assert set(inferred.keys()) == {first, second}


def test_inferred_types_check_across_corpus(corpus):
    for name, session in sorted(corpus.sessions.items()):
        result = infer(session, CheckBounds(max_visited=5_000))
        if isinstance(result, GlobalNode):
            assert check(result, session).accepted, name


def test_stuck_and_orphan_sessions_are_rejected(counterexamples):
    stuck = infer(counterexamples.sessions["Stuck"])
    assert stuck.status is Status.REJECTED
    assert stuck.reason is Reason.END_MISMATCH

    orphan = infer(counterexamples.sessions["Orphan"])
    assert orphan.status is Status.REJECTED
    assert orphan.reason is Reason.ORPHAN_AT_END


def test_unbounded_queue_is_inconclusive(load):
    session = load("participant P = q!l . P\nsession S = p :: P with []").sessions["S"]
    verdict = infer(session, CheckBounds(max_queue=2))
    assert verdict.status is Status.INCONCLUSIVE
    assert verdict.bound == "max_queue=2"


def test_unknown_strategy(client_server):
    with pytest.raises(ValueError):
        infer(client_server.sessions["CS"], strategy="greedy")


def test_round_trip_on_random_typable_sessions():
    rng = np.random.default_rng(2024)
    limits = GenerationLimits(max_participants=3, max_width=2, max_depth=4)
    bounds = CheckBounds(max_visited=300, max_queue=3)
    found = random_typable_sessions(rng, 500, limits=limits, bounds=bounds)
    assert len(found) == 500
    for session, inferred in found:
        assert check(inferred, session, bounds).accepted
