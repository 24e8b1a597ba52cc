"""
Session semantics — networks, sessions and the asynchronous Out/In LTS.

Networks never hold terminated processes, so two sessions equal up to the
neutral ``p :: end`` and to queue commutation are equal values. Process
nodes are compared by identity, which is sound because resolution builds
each definition once.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .errors import TraceError
from .message_queue import EMPTY_QUEUE, Queue, apply_label
from .terms import CommLabel, Kind, ProcessNode

logger = logging.getLogger(__name__)

Trace = Tuple[CommLabel, ...]


# ═══════════════════════════════════════════════════════════════════════════
# Networks and Sessions
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Network:
    """Participant bindings sorted by name, terminated processes dropped."""
    bindings: Tuple[Tuple[str, ProcessNode], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, ProcessNode]) -> "Network":
        return cls(tuple(sorted(
            ((p, node) for p, node in mapping.items() if not node.is_terminated),
            key=lambda item: item[0],
        )))

    @property
    def plays(self) -> FrozenSet[str]:
        return frozenset(p for p, _ in self.bindings)

    @property
    def is_final(self) -> bool:
        return not self.bindings

    def participants(self) -> List[str]:
        return [p for p, _ in self.bindings]

    def process_of(self, participant: str) -> Optional[ProcessNode]:
        for p, node in self.bindings:
            if p == participant:
                return node
        return None

    def replace(self, participant: str, node: ProcessNode) -> "Network":
        table: Dict[str, ProcessNode] = dict(self.bindings)
        table[participant] = node
        return Network.of(table)


@dataclass(frozen=True)
class Session:
    """A network running against a queue."""
    network: Network
    queue: Queue = EMPTY_QUEUE

    @property
    def plays(self) -> FrozenSet[str]:
        return self.network.plays

    @property
    def is_final(self) -> bool:
        return self.network.is_final


# ═══════════════════════════════════════════════════════════════════════════
# Transitions
# ═══════════════════════════════════════════════════════════════════════════

def step(session: Session, label: CommLabel) -> Optional[Session]:
    """Fire ``label`` (axioms Out / In); None when no axiom applies."""
    process = session.network.process_of(label.player)
    if process is None:
        return None
    continuation = process.successor(label.prefix)
    if continuation is None:
        return None
    queue = apply_label(label, session.queue)
    if queue is None:
        return None
    return Session(session.network.replace(label.player, continuation), queue)


def _labels_of(participant: str, process: ProcessNode, queue: Queue) -> List[CommLabel]:
    labels = []
    for prefix, _ in process.branches:
        if prefix.kind is Kind.OUTPUT or queue.head(prefix.peer, participant) == prefix.tag:
            labels.append(CommLabel.of(participant, prefix))
    return labels


def enabled_labels(session: Session) -> FrozenSet[CommLabel]:
    """Every label for which ``step`` is defined."""
    return frozenset(
        label
        for p, process in session.network.bindings
        for label in _labels_of(p, process, session.queue)
    )


def enabled_for(participant: str, session: Session) -> FrozenSet[CommLabel]:
    """Enabled labels whose player is ``participant``."""
    process = session.network.process_of(participant)
    if process is None:
        return frozenset()
    return frozenset(_labels_of(participant, process, session.queue))


def is_satisfied(participant: str, session: Session) -> bool:
    """
    A participant is satisfied when every sender it waits on in its top
    choice has, at the head of the channel, a tag it is ready to read.
    """
    process = session.network.process_of(participant)
    if process is None:
        return True
    required = set()
    readable = set()
    for prefix, _ in process.branches:
        if prefix.kind is Kind.INPUT:
            required.add(prefix.peer)
            if session.queue.head(prefix.peer, participant) == prefix.tag:
                readable.add(prefix.peer)
    return required <= readable


def coherent_sets(session: Session) -> List[FrozenSet[CommLabel]]:
    """
    Coherent label sets, in canonical order: the enabled labels of each
    satisfied participant (by name), then the full enabled set.
    """
    result: List[FrozenSet[CommLabel]] = []
    for p in session.network.participants():
        if not is_satisfied(p, session):
            continue
        own = enabled_for(p, session)
        if own and own not in result:
            result.append(own)
    everything = enabled_labels(session)
    if everything:
        if everything in result:
            result.remove(everything)
        result.append(everything)
    return result


# ═══════════════════════════════════════════════════════════════════════════
# Traces
# ═══════════════════════════════════════════════════════════════════════════

def run_trace_checked(session: Session, trace: Sequence[CommLabel]) -> Session:
    """Fold ``step`` over ``trace``; raises TraceError at the first label that cannot fire."""
    current = session
    for index, label in enumerate(trace):
        successor = step(current, label)
        if successor is None:
            raise TraceError(f"label {label} cannot fire at index {index}", index)
        current = successor
    return current


def run_trace(session: Session, trace: Sequence[CommLabel]) -> Optional[Session]:
    """Fold ``step`` over ``trace``; None if some label cannot fire."""
    try:
        return run_trace_checked(session, trace)
    except TraceError as e:
        logger.debug("Trace stopped: %s", e)
        return None
