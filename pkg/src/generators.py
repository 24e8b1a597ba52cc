"""
Random session and type generation for fuzzing and round-trip tests.

Three shapes are produced from a numpy Generator:

* ``random_session``: each participant gets an arbitrary small process
  graph with mixed choices, plus a few queued messages.
* ``guided_session``: processes are the projections of a random
  interaction sequence, optionally looped, so most of them are typable.
* ``random_global``: an arbitrary small global type graph, for the laws of
  term equality and printing.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple, Type

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .bounds import CheckBounds
from .config import Config
from .inference import infer
from .message_queue import Message, Queue
from .session import Network, Session
from .terms import END, TERMINATED, ActionPrefix, BranchKey, CommLabel, GlobalNode, Kind, ProcessNode, TermNode

logger = logging.getLogger(__name__)

PARTICIPANT_NAMES = ("p", "q", "r", "s")
TAG_NAMES = ("a", "b", "c")


class GenerationLimits(BaseModel):
    """Size limits for generated sessions."""
    model_config = ConfigDict(frozen=True)

    max_participants: int = Field(default=Config.FUZZ_MAX_PARTICIPANTS, ge=2, le=len(PARTICIPANT_NAMES))
    max_tags: int = Field(default=Config.FUZZ_MAX_TAGS, ge=1, le=len(TAG_NAMES))
    max_width: int = Field(default=Config.FUZZ_MAX_WIDTH, ge=1)
    max_depth: int = Field(default=Config.FUZZ_MAX_DEPTH, ge=1)
    queue_messages: int = Field(default=Config.FUZZ_QUEUE_MESSAGES, ge=0)

    @classmethod
    def from_config(cls, config: Optional[Config] = None) -> "GenerationLimits":
        config = config or Config()
        return cls(
            max_participants=config.FUZZ_MAX_PARTICIPANTS,
            max_tags=config.FUZZ_MAX_TAGS,
            max_width=config.FUZZ_MAX_WIDTH,
            max_depth=config.FUZZ_MAX_DEPTH,
            queue_messages=config.FUZZ_QUEUE_MESSAGES,
        )


def _pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def _alphabet(rng: np.random.Generator, limits: GenerationLimits) -> Tuple[List[str], List[str]]:
    n_participants = int(rng.integers(2, limits.max_participants + 1))
    n_tags = int(rng.integers(1, limits.max_tags + 1))
    return list(PARTICIPANT_NAMES[:n_participants]), list(TAG_NAMES[:n_tags])


# ── Unconstrained graphs ─────────────────────────────────────────────────

def _random_graph(rng: np.random.Generator, node_type: Type[TermNode], terminal: TermNode,
                  draw_key: Callable[[], BranchKey], limits: GenerationLimits) -> TermNode:
    """Up to ``max_depth`` nodes; edges go forward, back (cycles) or to the terminal."""
    size = int(rng.integers(1, limits.max_depth + 1))
    nodes = [node_type() for _ in range(size)]
    for i, node in enumerate(nodes):
        used = set()
        for _ in range(int(rng.integers(1, limits.max_width + 1))):
            key = draw_key()
            if key in used:
                continue
            used.add(key)
            roll = rng.random()
            if i + 1 < size and roll < 0.6:
                target = nodes[int(rng.integers(i + 1, size))]
            elif roll < 0.8:
                target = nodes[int(rng.integers(0, i + 1))]
            else:
                target = terminal
            node.add_branch(key, target)
        node.seal()
    return nodes[0]


def _random_process(rng: np.random.Generator, peers: List[str], tags: List[str],
                    limits: GenerationLimits) -> ProcessNode:
    def draw() -> ActionPrefix:
        kind = Kind.OUTPUT if rng.random() < 0.5 else Kind.INPUT
        return ActionPrefix(kind, _pick(rng, peers), _pick(rng, tags))

    return _random_graph(rng, ProcessNode, TERMINATED, draw, limits)


def random_global(rng: np.random.Generator, limits: Optional[GenerationLimits] = None) -> GlobalNode:
    """A random regular global type with distinct labels per choice; it need not type anything."""
    limits = limits or GenerationLimits()
    participants, tags = _alphabet(rng, limits)

    def draw() -> CommLabel:
        kind = Kind.OUTPUT if rng.random() < 0.5 else Kind.INPUT
        player = _pick(rng, participants)
        partner = _pick(rng, [q for q in participants if q != player])
        return CommLabel(kind, player, partner, _pick(rng, tags))

    return _random_graph(rng, GlobalNode, END, draw, limits)


def random_session(rng: np.random.Generator, limits: Optional[GenerationLimits] = None) -> Session:
    """A random well-formed session; it need not be typable."""
    limits = limits or GenerationLimits()
    participants, tags = _alphabet(rng, limits)
    bindings: Dict[str, ProcessNode] = {}
    for p in participants:
        peers = [q for q in participants if q != p]
        bindings[p] = _random_process(rng, peers, tags, limits)

    messages = []
    for _ in range(int(rng.integers(0, limits.queue_messages + 1))):
        sender = _pick(rng, participants)
        receiver = _pick(rng, [q for q in participants if q != sender])
        messages.append(Message(sender, _pick(rng, tags), receiver))
    return Session(Network.of(bindings), Queue.from_messages(messages))


# ── Projected sessions ───────────────────────────────────────────────────

def guided_session(rng: np.random.Generator, limits: Optional[GenerationLimits] = None) -> Session:
    """
    Project a random sequence of interactions onto its participants. At each
    interaction the sender chooses among up to ``max_width`` tags and the
    receiver offers all of them; with probability one half the sequence loops.
    """
    limits = limits or GenerationLimits()
    participants, tags = _alphabet(rng, limits)
    interactions = []
    for _ in range(int(rng.integers(1, limits.max_depth + 1))):
        sender = _pick(rng, participants)
        receiver = _pick(rng, [q for q in participants if q != sender])
        width = int(rng.integers(1, min(limits.max_width, len(tags)) + 1))
        chosen = [str(t) for t in rng.choice(tags, size=width, replace=False)]
        interactions.append((sender, receiver, sorted(chosen)))

    looping = bool(rng.random() < 0.5)
    involved = {p for s, r, _ in interactions for p in (s, r)}
    starts = {p: ProcessNode() for p in involved} if looping else {}
    continuation: Dict[str, ProcessNode] = {p: starts.get(p, TERMINATED) for p in involved}

    for sender, receiver, choice in reversed(interactions):
        out_node = ProcessNode()
        in_node = ProcessNode()
        for tag in choice:
            out_node.add_branch(ActionPrefix(Kind.OUTPUT, receiver, tag), continuation[sender])
            in_node.add_branch(ActionPrefix(Kind.INPUT, sender, tag), continuation[receiver])
        continuation[sender] = out_node.seal()
        continuation[receiver] = in_node.seal()

    if looping:
        for p, start in starts.items():
            for prefix, child in continuation[p].branches:
                start.add_branch(prefix, child)
            continuation[p] = start.seal()
    return Session(Network.of(continuation))


def random_typable_sessions(
    rng: np.random.Generator,
    count: int,
    limits: Optional[GenerationLimits] = None,
    bounds: Optional[CheckBounds] = None,
    strategy: str = Config.INFERENCE_STRATEGY,
    max_attempts: Optional[int] = None,
) -> List[Tuple[Session, GlobalNode]]:
    """
    Sample sessions (mostly projected, some unconstrained) and keep those
    for which inference finds a type, with the inferred type.
    """
    limits = limits or GenerationLimits()
    bounds = bounds or CheckBounds(max_visited=2_000, max_queue=4)
    max_attempts = max_attempts or count * 20
    found: List[Tuple[Session, GlobalNode]] = []
    attempts = 0
    while len(found) < count and attempts < max_attempts:
        attempts += 1
        session = guided_session(rng, limits) if rng.random() < 0.75 else random_session(rng, limits)
        result = infer(session, bounds, strategy)
        if isinstance(result, GlobalNode):
            found.append((session, result))
    logger.info("Kept %d typable sessions out of %d samples", len(found), attempts)
    return found
