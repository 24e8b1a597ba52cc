"""
Properties — bounded model checking of session behaviour.

Lock freedom, orphan-message freedom and eventual reception are decided on
the explored state graph by reachability. A violation is definitive unless
the states it could still escape to were cut off by a bound; a clean graph
with truncated states is inconclusive.
"""

import json
import logging
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx
from pydantic import BaseModel, Field, PrivateAttr, model_validator

from .bounds import ExplorationBounds
from .explorer import StateGraph, explore
from .printer import describe_session
from .session import Session
from .terms import CommLabel, parse_trace

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# Verdicts
# ═══════════════════════════════════════════════════════════════════════════

class PropertyStatus(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class Counterexample(BaseModel):
    """A trace from the initial state to a violating state, and what it owes."""
    trace: List[str] = Field(default_factory=list)
    state: str
    obligation: str

    _session: Optional[Session] = PrivateAttr(default=None)

    @property
    def labels(self) -> Tuple[CommLabel, ...]:
        return parse_trace(",".join(self.trace))

    @property
    def session(self) -> Optional[Session]:
        return self._session


class Coverage(BaseModel):
    states: int = 0
    truncated: int = 0


class PropertyVerdict(BaseModel):
    """Outcome of a property check or a cross-check oracle."""
    name: str = Field(serialization_alias="property")
    status: PropertyStatus
    counterexample: Optional[Counterexample] = None
    coverage: Coverage = Field(default_factory=Coverage)
    detail: Optional[str] = None

    @model_validator(mode="after")
    def _fails_needs_counterexample(self):
        if self.status is PropertyStatus.FAILS and self.counterexample is None:
            raise ValueError("a failing verdict carries a counterexample")
        return self

    @property
    def holds(self) -> bool:
        return self.status is PropertyStatus.HOLDS

    def to_document(self) -> Dict:
        """``{property, status, counterexample?, coverage}``"""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False)


def counterexample_at(graph: StateGraph, state: int, obligation: str) -> Counterexample:
    result = Counterexample(
        trace=[str(label) for label in graph.trace_to(state)],
        state=describe_session(graph.states[state]),
        obligation=obligation,
    )
    result._session = graph.states[state]
    return result


def _coverage(graph: StateGraph) -> Coverage:
    return Coverage(states=len(graph), truncated=len(graph.truncated))


def _decide(name: str, graph: StateGraph, violations: Iterable[Tuple[int, str]]) -> PropertyVerdict:
    """
    Turn (state, obligation) violations into a verdict: the first one whose
    future is fully explored fails the property.
    """
    tainted: Optional[Tuple[int, str]] = None
    for state, obligation in sorted(violations):
        if graph.reaches_truncated(state):
            tainted = tainted or (state, obligation)
            continue
        logger.info("%s fails at state %d: %s", name, state, obligation)
        return PropertyVerdict(
            name=name, status=PropertyStatus.FAILS,
            counterexample=counterexample_at(graph, state, obligation),
            coverage=_coverage(graph),
        )
    if tainted is not None:
        state, obligation = tainted
        return PropertyVerdict(
            name=name, status=PropertyStatus.INCONCLUSIVE, coverage=_coverage(graph),
            detail=f"possible violation at state {state} ({obligation}) reaches truncated states",
        )
    if graph.truncated:
        return PropertyVerdict(
            name=name, status=PropertyStatus.INCONCLUSIVE, coverage=_coverage(graph),
            detail="no violation in the explored fragment, but exploration was truncated",
        )
    return PropertyVerdict(name=name, status=PropertyStatus.HOLDS, coverage=_coverage(graph))


def _can_reach(graph: nx.MultiDiGraph, targets: Set[int]) -> Set[int]:
    """States with a path (possibly empty) into ``targets``."""
    if not targets:
        return set()
    lengths = nx.multi_source_dijkstra_path_length(nx.reverse_view(graph), targets)
    return set(lengths)


# ═══════════════════════════════════════════════════════════════════════════
# Property Checks on an Explored Graph
# ═══════════════════════════════════════════════════════════════════════════

LOCK_FREEDOM = "lock-freedom"
ORPHAN_FREEDOM = "orphan-freedom"
EVENTUAL_RECEPTION = "eventual-reception"


def lock_freedom_on(graph: StateGraph) -> PropertyVerdict:
    """Every participant still playing can eventually fire a label of its own."""
    participants = sorted({p for s in graph.states for p in s.plays})
    violations = []
    for p in participants:
        acting = {i for i, label, _ in graph.edges if label.player == p}
        live = _can_reach(graph.graph, acting)
        violations.extend(
            (i, f"participant {p} can never act")
            for i, s in enumerate(graph.states)
            if p in s.plays and i not in live
        )
    return _decide(LOCK_FREEDOM, graph, violations)


def orphan_freedom_on(graph: StateGraph) -> PropertyVerdict:
    """Whenever every participant has terminated, the queue is empty."""
    violations = [
        (i, f"orphan messages {s.queue.to_dsl()} after termination")
        for i, s in enumerate(graph.states)
        if s.is_final and not s.queue.is_empty
    ]
    return _decide(ORPHAN_FREEDOM, graph, violations)


def eventual_reception_on(graph: StateGraph) -> PropertyVerdict:
    """Every channel head can eventually be read by its receiver."""
    pending: Dict[CommLabel, List[int]] = {}
    for i, s in enumerate(graph.states):
        for (sender, receiver), tags in s.queue.channels:
            pending.setdefault(CommLabel.input(receiver, sender, tags[0]), []).append(i)

    violations = []
    for consumer, states in pending.items():
        consuming = [(u, v, k) for u, v, k in graph.graph.edges(keys=True) if k == consumer]
        sources = {u for u, _, _ in consuming}
        without = nx.restricted_view(graph.graph, [], consuming)
        ready = _can_reach(without, sources)
        violations.extend(
            (i, f"message <{consumer.partner}, {consumer.tag}, {consumer.player}> is never read")
            for i in states if i not in ready
        )
    return _decide(EVENTUAL_RECEPTION, graph, violations)


PROPERTY_CHECKS = {
    LOCK_FREEDOM: lock_freedom_on,
    ORPHAN_FREEDOM: orphan_freedom_on,
    EVENTUAL_RECEPTION: eventual_reception_on,
}


# ── Session-level entry points ───────────────────────────────────────────

def check_lock_freedom(s: Session, bounds: Optional[ExplorationBounds] = None) -> PropertyVerdict:
    return lock_freedom_on(explore(s, bounds))


def check_orphan_freedom(s: Session, bounds: Optional[ExplorationBounds] = None) -> PropertyVerdict:
    return orphan_freedom_on(explore(s, bounds))


def check_eventual_reception(s: Session, bounds: Optional[ExplorationBounds] = None) -> PropertyVerdict:
    return eventual_reception_on(explore(s, bounds))


def check_properties(
    s: Session,
    names: Iterable[str] = tuple(PROPERTY_CHECKS),
    bounds: Optional[ExplorationBounds] = None,
) -> List[PropertyVerdict]:
    """Run several properties over a single exploration, in the given order."""
    names = list(names)
    unknown = [n for n in names if n not in PROPERTY_CHECKS]
    if unknown:
        raise ValueError(f"Unknown properties: {unknown}")
    graph = explore(s, bounds)
    return [PROPERTY_CHECKS[n](graph) for n in names]
