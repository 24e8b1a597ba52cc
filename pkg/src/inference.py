"""
Type Inference — synthesizes a global type for a session.

Depth-first search over session states. A final state with an empty queue
becomes ``End``; any other state picks a coherent set, solves every
successor, and becomes the choice over the picked labels. A state met again
while still being solved is tied back to its placeholder node, which yields
a cyclic (regular) type. A failed branch backtracks to the next coherent set.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Union

from .bounds import CheckBounds
from .config import Config
from .session import Session, coherent_sets, step
from .terms import END, GlobalNode, players_of_global
from .type_checker import Reason, Status, Verdict, check

logger = logging.getLogger(__name__)

STRATEGIES = ("satisfied-first", "full-set-only")


class _BoundExceeded(Exception):
    def __init__(self, bound: str):
        self.bound = bound
        super().__init__(bound)


@dataclass
class _Solved:
    node: GlobalNode
    players: FrozenSet[str]
    # in-progress states this node's graph still refers to
    open_refs: FrozenSet[Session] = field(default_factory=frozenset)


class _Search:
    def __init__(self, bounds: CheckBounds, strategy: str):
        self.bounds = bounds
        self.strategy = strategy
        self.in_progress: Dict[Session, GlobalNode] = {}
        self.done: Dict[Session, _Solved] = {}
        self.trail: List[Session] = []
        self.visited = 0
        self.backtracks = 0
        self.queue_overflow = False

    def candidates(self, state: Session) -> List[FrozenSet]:
        sets = coherent_sets(state)
        if self.strategy == "full-set-only":
            return sets[-1:]
        return sets

    def solve(self, state: Session) -> Optional[_Solved]:
        if state in self.done:
            solved = self.done[state]
            still_open = frozenset(r for r in solved.open_refs if r in self.in_progress)
            if still_open == solved.open_refs:
                return solved
            if not still_open:
                return _Solved(solved.node, players_of_global(solved.node))
            players = set(solved.players)
            for ref in solved.open_refs - still_open:
                if ref in self.done:
                    players |= self.done[ref].players
            return _Solved(solved.node, frozenset(players), still_open)
        if state in self.in_progress:
            return _Solved(self.in_progress[state], frozenset(), frozenset((state,)))

        if state.queue.max_channel_length() > self.bounds.max_queue:
            self.queue_overflow = True
            return None
        self.visited += 1
        if self.visited > self.bounds.max_visited:
            raise _BoundExceeded(f"max_visited={self.bounds.max_visited}")

        if state.is_final:
            if not state.queue.is_empty:
                logger.debug("Orphan messages at final state: %s", state.queue.to_dsl())
                return None
            return self._record(state, _Solved(END, frozenset()))

        placeholder = GlobalNode()
        self.in_progress[state] = placeholder
        try:
            for labels in self.candidates(state):
                mark = len(self.trail)
                branches = []
                players: Set[str] = {label.player for label in labels}
                open_refs: Set[Session] = set()
                for label in sorted(labels):
                    child = self.solve(step(state, label))
                    if child is None:
                        break
                    branches.append((label, child.node))
                    players |= child.players
                    open_refs |= child.open_refs
                else:
                    open_refs.discard(state)
                    if not open_refs and players != state.plays:
                        logger.debug("Players %s do not cover %s", sorted(players), sorted(state.plays))
                    else:
                        for label, child_node in branches:
                            placeholder.add_branch(label, child_node)
                        placeholder.seal()
                        return self._record(state, _Solved(placeholder, frozenset(players), frozenset(open_refs)))
                self.backtracks += 1
                self._rollback(mark)
            return None
        finally:
            del self.in_progress[state]

    def _record(self, state: Session, solved: _Solved) -> _Solved:
        self.done[state] = solved
        self.trail.append(state)
        return solved

    def _rollback(self, mark: int):
        """Forget results that leaned on a state whose attempt just failed."""
        kept = []
        for state in self.trail[mark:]:
            if self.done[state].open_refs:
                del self.done[state]
            else:
                kept.append(state)
        del self.trail[mark:]
        self.trail.extend(kept)


def infer(
    s: Session,
    bounds: Optional[CheckBounds] = None,
    strategy: str = Config.INFERENCE_STRATEGY,
) -> Union[GlobalNode, Verdict]:
    """
    A global type typing ``s``, or a rejected/inconclusive verdict.

    ``satisfied-first`` tries the coherent sets in canonical order and so
    prefers the per-participant sets; ``full-set-only`` only ever uses the
    full enabled set.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown inference strategy '{strategy}' (expected one of {STRATEGIES})")
    bounds = bounds or CheckBounds()
    search = _Search(bounds, strategy)
    try:
        solved = search.solve(s)
    except _BoundExceeded as e:
        logger.warning("Inference stopped: %s", e.bound)
        return Verdict(status=Status.INCONCLUSIVE, reason=Reason.BOUND_EXCEEDED, bound=e.bound)
    except RecursionError:
        logger.warning("Inference stopped: search too deep")
        return Verdict(status=Status.INCONCLUSIVE, reason=Reason.BOUND_EXCEEDED, bound="search depth")

    if solved is None:
        if search.queue_overflow:
            logger.warning("Inference inconclusive: a channel exceeded %d messages", bounds.max_queue)
            return Verdict(status=Status.INCONCLUSIVE, reason=Reason.BOUND_EXCEEDED, bound=f"max_queue={bounds.max_queue}")
        logger.info("No global type found (%d states, %d backtracks)", search.visited, search.backtracks)
        return Verdict(status=Status.REJECTED, reason=_rejection_reason(s), detail="no coherent choice types every reachable state")

    verdict = check(solved.node, s, bounds)
    if not verdict.accepted:
        logger.error("Inferred type failed its own check: %s", verdict.reason)
        return verdict
    logger.info("Inferred a global type over %d states (%d backtracks)", search.visited, search.backtracks)
    return solved.node


def _rejection_reason(s: Session) -> Reason:
    if s.is_final:
        return Reason.ORPHAN_AT_END
    if not coherent_sets(s):
        return Reason.END_MISMATCH
    return Reason.COHERENCE_VIOLATION
