"""
Type Checker — the coinductive judgment ``G ⊢ N || Q`` and its sound variant.

Pairs of (global node, session state) are explored depth-first. Each pair
must satisfy the local premises of the communication rule; a pair met again
is accepted coinductively. Every branch of a global choice pairs with exactly
one session transition, so no matching search is needed.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from .bounds import CheckBounds
from .config import Config
from .printer import describe_session, render_term
from .session import Session, coherent_sets, step
from .terms import CommLabel, GlobalNode, players_of_global
from .type_semantics import TypeConfiguration, is_sound, unsound_messages

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# Verdicts
# ═══════════════════════════════════════════════════════════════════════════

class Status(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    INCONCLUSIVE = "inconclusive"


class Reason(str, Enum):
    END_MISMATCH = "end-mismatch"
    COHERENCE_VIOLATION = "coherence-violation"
    PLAYERS_MISMATCH = "players-mismatch"
    BRANCH_STEP_UNDEFINED = "branch-step-undefined"
    SOUNDNESS_VIOLATION = "soundness-violation"
    BOUND_EXCEEDED = "bound-exceeded"
    ORPHAN_AT_END = "orphan-at-end"


PREMISES = {
    Reason.END_MISMATCH: "End axiom: End types exactly the terminated network",
    Reason.ORPHAN_AT_END: "End axiom: the queue must be empty when every participant has terminated",
    Reason.PLAYERS_MISMATCH: "players of the global type must equal the plays of the network",
    Reason.COHERENCE_VIOLATION: "the top labels must form a coherent set for the session",
    Reason.BRANCH_STEP_UNDEFINED: "every top label must be a transition of the session",
    Reason.SOUNDNESS_VIOLATION: "every queued message must have finite weight in the global type",
}


class Witness(BaseModel):
    """The pair at which a premise failed, rendered for humans."""
    model_config = ConfigDict(populate_by_name=True)

    session: str
    global_type: str = Field(serialization_alias="global")
    labels: List[str] = Field(default_factory=list)
    coherent_sets: List[List[str]] = Field(default_factory=list)
    trace: List[str] = Field(default_factory=list, description="Session labels leading from the root pair")
    premise: Optional[str] = None
    details: List[str] = Field(default_factory=list)


class CheckStats(BaseModel):
    visited: int = 0
    memo_hits: int = 0


class Verdict(BaseModel):
    """Outcome of ``check`` or ``infer``."""
    status: Status
    reason: Optional[Reason] = None
    witness: Optional[Witness] = None
    stats: CheckStats = Field(default_factory=CheckStats)
    bound: Optional[str] = None
    detail: Optional[str] = None

    _state: Optional[Session] = PrivateAttr(default=None)
    _global: Optional[GlobalNode] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _reason_matches_status(self):
        if self.status is Status.ACCEPTED and self.reason is not None:
            raise ValueError("an accepted verdict carries no reason")
        if self.status is not Status.ACCEPTED and self.reason is None:
            raise ValueError(f"a {self.status.value} verdict needs a reason")
        return self

    @property
    def accepted(self) -> bool:
        return self.status is Status.ACCEPTED

    @property
    def witness_session(self) -> Optional[Session]:
        return self._state

    @property
    def witness_global(self) -> Optional[GlobalNode]:
        return self._global


def check_report(verdict: Verdict) -> Dict:
    """JSON document for a verdict: ``{status, reason?, witness?, stats, bound?}``."""
    return verdict.model_dump(mode="json", by_alias=True, exclude_none=True)


# ═══════════════════════════════════════════════════════════════════════════
# Checking
# ═══════════════════════════════════════════════════════════════════════════

PairKey = Tuple[int, Session]


class CheckMemo:
    """
    Pairs already proven typed, shared across ``check`` calls.

    Every pair visited by an accepting run lies in a closed set of pairs
    whose premises hold, so later runs may stop at any of them. Rejected and
    inconclusive runs record nothing. A memo belongs to one checking mode.
    """

    def __init__(self, sound_mode: bool = False, strict_weight: bool = Config.WEIGHT_STRICT):
        self.sound_mode = sound_mode
        self.strict_weight = strict_weight
        self.typed: Set[PairKey] = set()
        # keeps every recorded node alive, so id() keys stay unique
        self._nodes: Dict[int, GlobalNode] = {}
        self.hits = 0

    def __contains__(self, key: PairKey) -> bool:
        return key in self.typed

    def __len__(self) -> int:
        return len(self.typed)

    def record(self, keys: Set[PairKey], nodes: Dict[int, GlobalNode]):
        self.typed |= keys
        self._nodes.update(nodes)


def _local_failure(node: GlobalNode, session: Session, sound_mode: bool, strict_weight: bool) -> Optional[Reason]:
    """The first premise the pair violates, if any."""
    if session.is_final:
        if not node.is_end:
            return Reason.END_MISMATCH
        if not session.queue.is_empty:
            return Reason.ORPHAN_AT_END
        return None
    if node.is_end:
        return Reason.END_MISMATCH
    if players_of_global(node) != session.plays:
        return Reason.PLAYERS_MISMATCH
    if frozenset(node.keys()) not in coherent_sets(session):
        return Reason.COHERENCE_VIOLATION
    if any(step(session, label) is None for label in node.keys()):
        return Reason.BRANCH_STEP_UNDEFINED
    if sound_mode and not is_sound(TypeConfiguration(node, session.queue), strict_weight):
        return Reason.SOUNDNESS_VIOLATION
    return None


def _witness(node: GlobalNode, session: Session, reason: Reason, trace: List[CommLabel], strict_weight: bool) -> Witness:
    details: List[str] = []
    if reason is Reason.PLAYERS_MISMATCH:
        details.append(f"players: {sorted(players_of_global(node))}, plays: {sorted(session.plays)}")
    elif reason is Reason.BRANCH_STEP_UNDEFINED:
        details.extend(f"cannot fire {label}" for label in sorted(node.keys()) if step(session, label) is None)
    elif reason is Reason.SOUNDNESS_VIOLATION:
        config = TypeConfiguration(node, session.queue)
        details.extend(f"infinite weight: {m}" for m in unsound_messages(config, strict_weight))
    return Witness(
        session=describe_session(session),
        global_type=render_term(node),
        labels=[str(label) for label in sorted(node.keys())],
        coherent_sets=[[str(label) for label in sorted(s)] for s in coherent_sets(session)],
        trace=[str(label) for label in trace],
        premise=PREMISES.get(reason),
        details=details,
    )


def _trace_to(key: PairKey, parents: Dict[PairKey, Tuple[Optional[PairKey], Optional[CommLabel]]]) -> List[CommLabel]:
    trace = []
    parent, label = parents[key]
    while parent is not None:
        trace.append(label)
        parent, label = parents[parent]
    return list(reversed(trace))


def check(
    g: GlobalNode,
    s: Session,
    bounds: Optional[CheckBounds] = None,
    sound_mode: bool = False,
    strict_weight: bool = Config.WEIGHT_STRICT,
    memo: Optional[CheckMemo] = None,
) -> Verdict:
    """
    Decide ``g ⊢ s`` (or ``⊢_S`` with ``sound_mode``) within ``bounds``.

    Rejections are definitive. Pairs whose queue outgrows the bound are set
    aside; if nothing else fails, the verdict is inconclusive. Pairs found in
    ``memo`` are taken as typed, and an accepting run adds its pairs to it.
    """
    bounds = bounds or CheckBounds()
    if memo is not None and (memo.sound_mode, memo.strict_weight) != (sound_mode, strict_weight):
        raise ValueError("memo was built for another checking mode")
    stats = CheckStats()
    seen: Set[PairKey] = set()
    # keeps every visited node alive, so id() keys stay unique
    nodes: Dict[int, GlobalNode] = {}
    parents: Dict[PairKey, Tuple[Optional[PairKey], Optional[CommLabel]]] = {}
    overflow: Optional[PairKey] = None

    root: PairKey = (id(g), s)
    parents[root] = (None, None)
    stack: List[Tuple[GlobalNode, Session]] = [(g, s)]

    while stack:
        node, session = stack.pop()
        key = (id(node), session)
        if key in seen:
            stats.memo_hits += 1
            continue
        if memo is not None and key in memo:
            memo.hits += 1
            stats.memo_hits += 1
            continue
        if session.queue.max_channel_length() > bounds.max_queue:
            overflow = overflow or key
            continue
        if len(seen) >= bounds.max_visited:
            logger.warning("Type check stopped after %d pairs (max_visited)", len(seen))
            verdict = Verdict(
                status=Status.INCONCLUSIVE, reason=Reason.BOUND_EXCEEDED, stats=stats,
                bound=f"max_visited={bounds.max_visited}",
            )
            verdict._state, verdict._global = session, node
            return verdict

        seen.add(key)
        nodes[id(node)] = node
        stats.visited += 1

        reason = _local_failure(node, session, sound_mode, strict_weight)
        if reason is not None:
            trace = _trace_to(key, parents)
            logger.debug("Premise failed (%s) at %s", reason.value, describe_session(session))
            verdict = Verdict(
                status=Status.REJECTED, reason=reason, stats=stats,
                witness=_witness(node, session, reason, trace, strict_weight),
            )
            verdict._state, verdict._global = session, node
            return verdict

        for label, child in reversed(node.sorted_branches()):
            successor = step(session, label)
            child_key = (id(child), successor)
            if child_key not in parents:
                parents[child_key] = (key, label)
            stack.append((child, successor))

    if overflow is not None:
        logger.warning("Type check inconclusive: a channel exceeded %d messages", bounds.max_queue)
        verdict = Verdict(
            status=Status.INCONCLUSIVE, reason=Reason.BOUND_EXCEEDED, stats=stats,
            bound=f"max_queue={bounds.max_queue}",
        )
        verdict._state = overflow[1]
        return verdict

    if memo is not None:
        memo.record(seen, nodes)
    logger.debug("Accepted after %d pairs (%d memo hits)", stats.visited, stats.memo_hits)
    return Verdict(status=Status.ACCEPTED, stats=stats)
