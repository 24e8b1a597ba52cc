import pytest

from src.bounds import CheckBounds
from src.inference import STRATEGIES, infer
from src.terms import GlobalNode, players_of_global
from src.type_checker import Reason, Status, Verdict, check, check_report


@pytest.mark.parametrize("sound_mode", [False, True])
def test_client_server_accepted(client_server, sound_mode):
    verdict = check(client_server.globals["G_cs"], client_server.sessions["CS"], sound_mode=sound_mode)
    assert verdict.status is Status.ACCEPTED
    assert verdict.reason is None
    assert verdict.stats.visited > 0


def test_client_server_strict_weight(client_server):
    verdict = check(
        client_server.globals["G_cs"], client_server.sessions["CS"],
        sound_mode=True, strict_weight=True,
    )
    assert verdict.accepted


def test_accepted_typing_has_matching_players(client_server):
    g, s = client_server.globals["G_cs"], client_server.sessions["CS"]
    assert check(g, s).accepted
    assert players_of_global(g) == s.plays


def test_coherence_violation_at_root(counterexamples):
    verdict = check(counterexamples.globals["G_coherence"], counterexamples.sessions["Coherence"])
    assert verdict.status is Status.REJECTED
    assert verdict.reason is Reason.COHERENCE_VIOLATION
    assert verdict.witness.trace == []
    assert verdict.witness.labels == ["p>q!l"]
    assert verdict.witness.coherent_sets == [["r>p!l"], ["p>q!l", "r>p!l"]]
    assert verdict.witness_session == counterexamples.sessions["Coherence"]
    assert verdict.witness_global is counterexamples.globals["G_coherence"]


def test_players_mismatch(counterexamples):
    verdict = check(counterexamples.globals["G_plays"], counterexamples.sessions["Plays"])
    assert verdict.reason is Reason.PLAYERS_MISMATCH
    assert "plays: ['p', 'q', 'r']" in verdict.witness.details[0]


def test_end_mismatch_and_orphans(load, counterexamples):
    program = load("global G = End\nglobal H = p q ! l . End\nsession S = p :: q!l . end with []")
    assert check(program.globals["G"], program.sessions["S"]).reason is Reason.END_MISMATCH
    orphan = counterexamples.sessions["Orphan"]
    assert check(program.globals["G"], orphan).reason is Reason.ORPHAN_AT_END
    assert check(program.globals["H"], orphan).reason is Reason.END_MISMATCH


def test_rejection_after_some_steps(load):
    program = load(
        "global G = p q ! l . q p ? l . End\n"
        "session S = p :: q!l . end || q :: p?m . end with []\n"
    )
    verdict = check(program.globals["G"], program.sessions["S"])
    assert verdict.status is Status.REJECTED
    assert verdict.witness.trace == ["p>q!l"]


def test_soundness_violation_only_in_sound_mode(load):
    # nobody ever reads p's message
    program = load(
        "global G = q r ! b . r q ? b . End\n"
        "session S = q :: r!b . end || r :: q?b . end with [<p, a, q>]\n"
    )
    g, s = program.globals["G"], program.sessions["S"]
    plain = check(g, s)
    assert plain.reason is Reason.ORPHAN_AT_END
    sound = check(g, s, sound_mode=True)
    assert sound.reason is Reason.SOUNDNESS_VIOLATION
    assert sound.witness.details == ["infinite weight: <p, a, q>"]


def test_visit_bound_is_inconclusive(client_server):
    verdict = check(client_server.globals["G_cs"], client_server.sessions["CS"], CheckBounds(max_visited=1))
    assert verdict.status is Status.INCONCLUSIVE
    assert verdict.reason is Reason.BOUND_EXCEEDED
    assert verdict.bound == "max_visited=1"


def test_queue_bound_is_inconclusive(load):
    program = load(
        "participant P = q!l . P\n"
        "global G = p q ! l . G\n"
        "session S = p :: P with []\n"
    )
    verdict = check(program.globals["G"], program.sessions["S"], CheckBounds(max_queue=3))
    assert verdict.status is Status.INCONCLUSIVE
    assert verdict.bound == "max_queue=3"
    assert verdict.witness_session.queue.max_channel_length() == 4


def test_report_document(counterexamples):
    verdict = check(counterexamples.globals["G_coherence"], counterexamples.sessions["Coherence"])
    report = check_report(verdict)
    assert report["status"] == "rejected"
    assert report["reason"] == "coherence-violation"
    assert "global" in report["witness"]
    assert "bound" not in report


def test_verdict_reason_must_match_status():
    with pytest.raises(ValueError):
        Verdict(status=Status.ACCEPTED, reason=Reason.END_MISMATCH)
    with pytest.raises(ValueError):
        Verdict(status=Status.REJECTED)


@pytest.mark.parametrize("g_name, expected", [
    ("G_workers_alt", Status.ACCEPTED),
    ("G_workers", Status.REJECTED),
])
def test_client_server_workers(corpus, g_name, expected):
    program = corpus.programs["client_server_workers.mps"]
    verdict = check(program.globals[g_name], program.sessions["Workers"])
    assert verdict.status is expected
    if expected is Status.REJECTED:
        assert verdict.reason is Reason.COHERENCE_VIOLATION


@pytest.mark.parametrize("g_name, expected", [
    ("G_timeout", Status.ACCEPTED),
    ("G_timeout_alt", Status.ACCEPTED),
    ("G_timeout_displayed", Status.REJECTED),
])
def test_time_out(corpus, g_name, expected):
    program = corpus.programs["time_out.mps"]
    assert check(program.globals[g_name], program.sessions["TimeOut"]).status is expected


def test_exchange_accepted(corpus):
    program = corpus.programs["asynchrony.mps"]
    assert check(program.globals["G_Exchange"], program.sessions["Exchange"]).accepted


# ── Corpus-wide laws ─────────────────────────────────────────────────────

def test_sound_mode_only_restricts(declared_pair):
    g, s = declared_pair
    if check(g, s, sound_mode=True).accepted:
        assert check(g, s).accepted


def test_raising_bounds_never_flips_a_verdict(declared_pair):
    g, s = declared_pair
    final = check(g, s)
    assert final.status is not Status.INCONCLUSIVE
    for bounds in (CheckBounds(max_visited=50, max_queue=2), CheckBounds(max_visited=500, max_queue=4)):
        verdict = check(g, s, bounds)
        if verdict.status is not Status.INCONCLUSIVE:
            assert verdict.status is final.status


def test_inference_strategies_agree(corpus_session):
    bounds = CheckBounds(max_visited=5_000)
    results = [infer(corpus_session, bounds, strategy) for strategy in STRATEGIES]
    for result in results:
        if isinstance(result, GlobalNode):
            assert check(result, corpus_session, bounds).accepted
    if all(isinstance(result, GlobalNode) for result in results):
        assert {players_of_global(result) for result in results} == {corpus_session.plays}
