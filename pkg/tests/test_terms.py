import pytest
from numpy.random import default_rng

from src.errors import UsageError
from src.generators import GenerationLimits, random_global
from src.message_queue import EMPTY_QUEUE, Message, Queue, apply_label
from src.terms import (
    END,
    CommLabel,
    GlobalNode,
    Kind,
    ProcessNode,
    bisim_equal,
    capabilities,
    parse_label,
    parse_trace,
    players_of_global,
)


# ── Labels ───────────────────────────────────────────────────────────────

def test_parse_label_forms():
    assert parse_label("p>q!t") == CommLabel.output("p", "q", "t")
    assert parse_label(" p < q ? t ") == CommLabel.input("p", "q", "t")
    assert str(parse_label("c>s!req")) == "c>s!req"


@pytest.mark.parametrize("text", ["p>q?t", "p<q!t", "pq!t", "p>q!", "", "_p>q!t", "p>q!_t", "1p>q!t"])
def test_parse_label_rejects(text):
    with pytest.raises(UsageError):
        parse_label(text)


def test_parse_trace():
    assert parse_trace("") == ()
    assert parse_trace("c>s!req, s<c?req") == (
        CommLabel.output("c", "s", "req"),
        CommLabel.input("s", "c", "req"),
    )


def test_outputs_sort_before_inputs():
    assert CommLabel.output("z", "z", "z") < CommLabel.input("a", "a", "a")
    assert Kind.OUTPUT.value == "!"


# ── Graphs ───────────────────────────────────────────────────────────────

def test_sealed_node_rejects_branches():
    node = ProcessNode().seal()
    with pytest.raises(RuntimeError):
        node.add_branch(CommLabel.output("p", "q", "l").prefix, node)


def test_bisim_equal_unfolding(load):
    program = load(
        "global A = p q ! l . A\n"
        "global B = p q ! l . p q ! l . B\n"
        "global C = p q ! l . End\n"
    )
    assert bisim_equal(program.globals["A"], program.globals["B"])
    assert not bisim_equal(program.globals["A"], program.globals["C"])


def test_bisim_equal_ignores_summand_order(load):
    program = load(
        "global D = p q ! a . End + p q ! b . End\n"
        "global E = p q ! b . End + p q ! a . End\n"
    )
    assert bisim_equal(program.globals["D"], program.globals["E"])


def test_bisim_equal_distinguishes_sorts():
    assert not bisim_equal(END, ProcessNode().seal())


def test_players_and_capabilities(client_server, load):
    g = client_server.globals["G_cs"]
    assert players_of_global(g) == frozenset({"c", "s"})
    assert len(capabilities(g)) == 6

    weighted = load("global G = p q ! l . q p ? l . G + p r ? l . End").globals["G"]
    assert capabilities(weighted) == frozenset({
        CommLabel.output("p", "q", "l"),
        CommLabel.input("q", "p", "l"),
        CommLabel.input("p", "r", "l"),
    })
    assert players_of_global(END) == frozenset()


# ── Queues ───────────────────────────────────────────────────────────────

def test_queue_channels_commute():
    a = EMPTY_QUEUE.push("p", "q", "a").push("r", "s", "b")
    b = EMPTY_QUEUE.push("r", "s", "b").push("p", "q", "a")
    assert a == b
    assert hash(a) == hash(b)
    assert a != EMPTY_QUEUE.push("p", "q", "a")


def test_queue_keeps_channel_order():
    q = Queue.from_messages([Message("p", "a", "q"), Message("p", "b", "q")])
    assert q.head("p", "q") == "a"
    assert q.pop("p", "q").channel("p", "q") == ("b",)
    assert q.pop("p", "q").pop("p", "q").is_empty
    assert q.to_dsl() == "[<p, a, q>, <p, b, q>]"


def test_apply_label():
    q = apply_label(CommLabel.output("p", "q", "a"), EMPTY_QUEUE)
    assert q.channel("p", "q") == ("a",)
    assert apply_label(CommLabel.input("q", "p", "a"), q) == EMPTY_QUEUE
    assert apply_label(CommLabel.input("q", "p", "b"), q) is None
    assert apply_label(CommLabel.input("q", "p", "a"), EMPTY_QUEUE) is None


# ── Randomized laws ──────────────────────────────────────────────────────

CASES = 1000
SMALL = GenerationLimits(max_participants=2, max_tags=1, max_width=2, max_depth=3)
NAMES = ("p", "q", "r")
TAGS = ("a", "b")


def _random_messages(rng, count):
    messages = []
    for _ in range(count):
        sender = NAMES[int(rng.integers(len(NAMES)))]
        receiver = NAMES[int(rng.integers(len(NAMES)))]
        if receiver == sender:
            receiver = NAMES[(NAMES.index(sender) + 1) % len(NAMES)]
        messages.append(Message(sender, TAGS[int(rng.integers(len(TAGS)))], receiver))
    return messages


def _interleave(rng, messages):
    """Shuffle across channels while each channel keeps its own order."""
    shuffled = [messages[i] for i in rng.permutation(len(messages))]
    pending = {}
    for m in messages:
        pending.setdefault((m.sender, m.receiver), []).append(m)
    return [pending[(m.sender, m.receiver)].pop(0) for m in shuffled]


def _unfold(node):
    """A fresh root with the same branches, pointing into the original graph."""
    root = type(node)()
    for key, child in node.branches:
        root.add_branch(key, child)
    return root.seal()


def test_queue_interleavings_across_channels_are_equal():
    rng = default_rng(5)
    for _ in range(CASES):
        messages = _random_messages(rng, int(rng.integers(0, 7)))
        queue = Queue.from_messages(messages)
        other = Queue.from_messages(_interleave(rng, messages))
        assert other == queue
        assert hash(other) == hash(queue)
        assert len(queue) == len(messages)
        for sender in NAMES:
            for receiver in NAMES:
                expected = tuple(m.tag for m in messages if (m.sender, m.receiver) == (sender, receiver))
                assert queue.channel(sender, receiver) == expected


def test_queue_same_channel_order_matters():
    rng = default_rng(6)
    for _ in range(CASES):
        messages = _random_messages(rng, int(rng.integers(0, 5)))
        sender, receiver = "p", "q"
        swapped = messages + [Message(sender, "b", receiver), Message(sender, "a", receiver)]
        ordered = messages + [Message(sender, "a", receiver), Message(sender, "b", receiver)]
        assert Queue.from_messages(swapped) != Queue.from_messages(ordered)
        assert Queue.from_messages(ordered).channel(sender, receiver)[-2:] == ("a", "b")


def test_bisimilarity_is_an_equivalence(copy_graph):
    rng = default_rng(7)
    for _ in range(CASES):
        a = random_global(rng, SMALL)
        b = random_global(rng, SMALL)
        assert bisim_equal(a, a)
        assert bisim_equal(a, b) == bisim_equal(b, a)

        middle = copy_graph(a)
        last = _unfold(copy_graph(a))
        assert bisim_equal(a, middle) and bisim_equal(middle, last)
        assert bisim_equal(a, last)
        assert bisim_equal(copy_graph(a), b) == bisim_equal(a, b)


def test_unfolding_preserves_behaviour():
    rng = default_rng(8)
    for _ in range(CASES):
        g = random_global(rng, SMALL)
        unfolded = _unfold(g)
        assert isinstance(unfolded, GlobalNode)
        assert unfolded is not g
        assert bisim_equal(g, unfolded)
        assert players_of_global(unfolded) == players_of_global(g)
        assert capabilities(unfolded) == capabilities(g)
