"""
Oracles — executable cross-checks of the type system's metatheory.

Subject reduction and session fidelity walk typed (global type, session)
pairs in lockstep; type progress searches the configuration LTS; the
satisfaction fuzzer runs random sessions. These test, they do not prove:
a failure points at a defect in the semantics or the checker.
"""

import logging
from collections import deque
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .bounds import CheckBounds
from .config import Config
from .errors import PreconditionViolation
from .generators import GenerationLimits, random_session
from .message_queue import Queue, apply_label
from .printer import describe_session, render_term
from .properties import Counterexample, Coverage, PropertyStatus, PropertyVerdict
from .session import Session, enabled_labels, is_satisfied, step
from .terms import CommLabel, GlobalNode, players_of_global
from .type_checker import CheckMemo, Status, Verdict, check
from .type_semantics import GlobalInterner, TypeConfiguration, gt_enabled, gt_step

logger = logging.getLogger(__name__)

SUBJECT_REDUCTION = "subject-reduction"
SESSION_FIDELITY = "session-fidelity"
TYPE_PROGRESS = "type-progress"
SATISFACTION_PRESERVATION = "satisfaction-preservation"

Pair = Tuple[GlobalNode, Session]
PairKey = Tuple[int, Session]


def _require_typed(g: GlobalNode, s: Session, bounds: CheckBounds, memo: Optional[CheckMemo] = None) -> Verdict:
    verdict = check(g, s, bounds, memo=memo)
    if not verdict.accepted:
        raise PreconditionViolation(
            f"cross-check needs an accepted typing, got {verdict.status.value}"
            + (f" ({verdict.reason.value})" if verdict.reason else "")
        )
    return verdict


# ═══════════════════════════════════════════════════════════════════════════
# Lockstep Walk
# ═══════════════════════════════════════════════════════════════════════════

class _LockstepWalk:
    """
    Breadth-first walk over typed pairs. ``labels_of`` picks the labels to
    follow from a pair; each is stepped on both sides and re-checked. All
    re-checks share one memo, so a successor inside an already typed region
    costs a lookup.
    """

    def __init__(self, name: str, g: GlobalNode, s: Session, bounds: CheckBounds,
                 labels_of: Callable[[GlobalNode, Session], List[CommLabel]],
                 memo: Optional[CheckMemo] = None):
        self.name = name
        self.bounds = bounds
        self.labels_of = labels_of
        self.memo = memo if memo is not None else CheckMemo()
        self.interner = GlobalInterner()
        self.root = (self.interner.intern(g), s)
        self.parents: Dict[PairKey, Tuple[Optional[PairKey], Optional[CommLabel]]] = {}
        self.truncated = 0

    def _key(self, pair: Pair) -> PairKey:
        return id(pair[0]), pair[1]

    def _trace(self, key: PairKey) -> List[str]:
        labels = []
        parent, label = self.parents[key]
        while parent is not None:
            labels.append(str(label))
            parent, label = self.parents[parent]
        return list(reversed(labels))

    def _fail(self, key: PairKey, session: Session, obligation: str) -> PropertyVerdict:
        logger.warning("%s cross-check failed: %s", self.name, obligation)
        counterexample = Counterexample(trace=self._trace(key), state=describe_session(session), obligation=obligation)
        counterexample._session = session
        return PropertyVerdict(
            name=self.name, status=PropertyStatus.FAILS, counterexample=counterexample,
            coverage=Coverage(states=len(self.parents), truncated=self.truncated),
        )

    def run(self) -> PropertyVerdict:
        root_key = self._key(self.root)
        self.parents[root_key] = (None, None)
        frontier = deque([self.root])
        inconclusive = False

        while frontier:
            node, session = frontier.popleft()
            key = self._key((node, session))
            config = TypeConfiguration(node, session.queue)
            for label in self.labels_of(node, session):
                successor = step(session, label)
                if successor is None:
                    return self._fail(key, session, f"type offers {label} but the session cannot fire it")
                target = gt_step(config, label)
                if target is None:
                    return self._fail(key, session, f"session fires {label} but the type has no such transition")
                if successor.queue.max_channel_length() > self.bounds.max_queue:
                    self.truncated += 1
                    continue
                target = self.interner.intern(target)
                child_key = self._key((target, successor))
                if child_key in self.parents:
                    continue
                if len(self.parents) >= self.bounds.max_visited:
                    self.truncated += 1
                    continue
                self.parents[child_key] = (key, label)
                verdict = check(target, successor, self.bounds, memo=self.memo)
                if verdict.status is Status.REJECTED:
                    return self._fail(
                        child_key, successor,
                        f"successor after {label} is not typed by {render_term(target)} ({verdict.reason.value})",
                    )
                if verdict.status is Status.INCONCLUSIVE:
                    inconclusive = True
                    continue
                frontier.append((target, successor))

        coverage = Coverage(states=len(self.parents), truncated=self.truncated)
        if inconclusive or self.truncated:
            return PropertyVerdict(
                name=self.name, status=PropertyStatus.INCONCLUSIVE, coverage=coverage,
                detail="some typed pairs were beyond the bounds",
            )
        logger.info("%s holds over %d typed pairs", self.name, len(self.parents))
        return PropertyVerdict(name=self.name, status=PropertyStatus.HOLDS, coverage=coverage)


def cross_check_subject_reduction(g: GlobalNode, s: Session, bounds: Optional[CheckBounds] = None) -> PropertyVerdict:
    """Every session transition of a typed pair is matched by the type and re-types."""
    bounds = bounds or CheckBounds()
    memo = CheckMemo()
    _require_typed(g, s, bounds, memo)
    walk = _LockstepWalk(
        SUBJECT_REDUCTION, g, s, bounds,
        lambda node, session: sorted(enabled_labels(session)),
        memo,
    )
    return walk.run()


def cross_check_session_fidelity(g: GlobalNode, s: Session, bounds: Optional[CheckBounds] = None) -> PropertyVerdict:
    """Every type transition of a typed pair is a session transition and re-types."""
    bounds = bounds or CheckBounds()
    memo = CheckMemo()
    _require_typed(g, s, bounds, memo)
    walk = _LockstepWalk(
        SESSION_FIDELITY, g, s, bounds,
        lambda node, session: sorted(gt_enabled(TypeConfiguration(node, session.queue))),
        memo,
    )
    return walk.run()


# ═══════════════════════════════════════════════════════════════════════════
# Type Progress
# ═══════════════════════════════════════════════════════════════════════════

def _reaches_player(root: TypeConfiguration, player: str, bounds: CheckBounds, interner: GlobalInterner) -> Optional[bool]:
    """
    True if some path of non-``player`` labels leads to a configuration
    offering a ``player`` label; None when the search hit a bound first.
    """
    start = (interner.intern(root.global_type), root.queue)
    seen = {(id(start[0]), start[1])}
    frontier = deque([start])
    cut = False
    while frontier:
        node, queue = frontier.popleft()
        config = TypeConfiguration(node, queue)
        labels = gt_enabled(config)
        if any(label.player == player for label in labels):
            return True
        for label in sorted(labels):
            target = interner.intern(gt_step(config, label))
            next_queue = apply_label(label, queue)
            if next_queue.max_channel_length() > bounds.max_queue or len(seen) >= bounds.max_visited:
                cut = True
                continue
            key = (id(target), next_queue)
            if key not in seen:
                seen.add(key)
                frontier.append((target, next_queue))
    return None if cut else False


def cross_check_type_progress(g: GlobalNode, q: Queue, bounds: Optional[CheckBounds] = None) -> PropertyVerdict:
    """Every player of ``g`` can be reached by type transitions that leave it idle."""
    bounds = bounds or CheckBounds()
    interner = GlobalInterner()
    root = TypeConfiguration(g, q)
    undecided = []
    for player in sorted(players_of_global(g)):
        outcome = _reaches_player(root, player, bounds, interner)
        if outcome is False:
            counterexample = Counterexample(
                state=f"{render_term(g)} with {q.to_dsl()}",
                obligation=f"participant {player} is starved by the type",
            )
            return PropertyVerdict(name=TYPE_PROGRESS, status=PropertyStatus.FAILS, counterexample=counterexample)
        if outcome is None:
            undecided.append(player)
    if undecided:
        return PropertyVerdict(
            name=TYPE_PROGRESS, status=PropertyStatus.INCONCLUSIVE,
            detail=f"search bounded before reaching {undecided}",
        )
    return PropertyVerdict(name=TYPE_PROGRESS, status=PropertyStatus.HOLDS)


# ═══════════════════════════════════════════════════════════════════════════
# Satisfaction Fuzzing
# ═══════════════════════════════════════════════════════════════════════════

def satisfaction_violation(session: Session, label: CommLabel) -> Optional[str]:
    """A participant satisfied before ``label`` but not after, if any."""
    successor = step(session, label)
    if successor is None:
        return None
    for p in session.network.participants():
        if p != label.player and is_satisfied(p, session) and not is_satisfied(p, successor):
            return p
    return None


def walk_for_unsatisfaction(
    start: Session,
    rng: np.random.Generator,
    steps: int,
) -> Tuple[int, Optional[Tuple[List[CommLabel], Session, CommLabel, str]]]:
    """
    Random walk of up to ``steps`` labels from ``start``, testing every
    enabled label on the way. Returns the number of labels tested and, on a
    violation, ``(trace, state, label, victim)`` where ``trace`` leads from
    ``start`` to ``state`` and ``label`` is the offending step from ``state``.
    """
    current = start
    trace: List[CommLabel] = []
    tested = 0
    for _ in range(steps):
        labels = sorted(enabled_labels(current))
        if not labels:
            break
        for label in labels:
            tested += 1
            victim = satisfaction_violation(current, label)
            if victim is not None:
                return tested, (trace, current, label, victim)
        chosen = labels[int(rng.integers(len(labels)))]
        trace.append(chosen)
        current = step(current, chosen)
    return tested, None


def fuzz_satisfaction_preservation(
    seed: int = Config.RANDOM_SEED,
    count: int = 1000,
    config: Optional[Config] = None,
) -> PropertyVerdict:
    """
    Generate ``count`` random sessions and walk each for a few random steps,
    checking that no step by another player unsatisfies a participant.
    """
    config = config or Config()
    rng = np.random.default_rng(seed)
    limits = GenerationLimits.from_config(config)
    steps_checked = 0

    for case in tqdm(range(count), desc="satisfaction fuzz", disable=not config.SHOW_PROGRESS):
        start = random_session(rng, limits)
        tested, violation = walk_for_unsatisfaction(start, rng, config.FUZZ_WALK_STEPS)
        steps_checked += tested
        if violation is not None:
            trace, state, label, victim = violation
            counterexample = Counterexample(
                trace=[str(x) for x in trace],
                state=describe_session(state),
                obligation=f"{victim} is unsatisfied by {label} (case {case}, start {describe_session(start)})",
            )
            counterexample._session = state
            return PropertyVerdict(
                name=SATISFACTION_PRESERVATION, status=PropertyStatus.FAILS,
                counterexample=counterexample, coverage=Coverage(states=steps_checked),
            )

    logger.info("Satisfaction preserved over %d cases (%d steps)", count, steps_checked)
    return PropertyVerdict(
        name=SATISFACTION_PRESERVATION, status=PropertyStatus.HOLDS,
        coverage=Coverage(states=steps_checked),
    )
