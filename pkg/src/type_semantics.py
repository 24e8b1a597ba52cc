"""
Type semantics — the LTS of type configurations ``G || Q``.

A label either fires a top-level branch of the global type directly (GE), or
is anticipated under every branch whose player differs (GI). GI is
coinductive; on cyclic graphs it is computed as a memoized transformation
in which revisiting a node in progress ties a cycle in the result.
"""

import logging
from dataclasses import dataclass
from functools import total_ordering
from typing import Dict, FrozenSet, List, Optional, Tuple

from .message_queue import Message, Queue, apply_label
from .terms import (
    CommLabel,
    GlobalNode,
    bisim_equal,
    capabilities,
)

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# Extended Naturals
# ═══════════════════════════════════════════════════════════════════════════

@total_ordering
@dataclass(frozen=True)
class ExtNat:
    """A natural number or infinity (``value is None``)."""
    value: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def succ(self) -> "ExtNat":
        return self if self.value is None else ExtNat(self.value + 1)

    def __lt__(self, other: "ExtNat") -> bool:
        if self.value is None:
            return False
        return other.value is None or self.value < other.value

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


INFINITY = ExtNat(None)
ZERO = ExtNat(0)


# ═══════════════════════════════════════════════════════════════════════════
# Type Configurations
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class TypeConfiguration:
    """A global type paired with a queue."""
    global_type: GlobalNode
    queue: Queue


def gt_step(config: TypeConfiguration, label: CommLabel) -> Optional[GlobalNode]:
    """
    The global type reached by firing ``label`` from ``config``, or None.

    The queue effect is checked once at the top: GI uses the same queue at
    every level, so the recursion only rewrites the type.
    """
    if apply_label(label, config.queue) is None:
        return None
    return _transform(config.global_type, label, {})


def _transform(node: GlobalNode, label: CommLabel, memo: Dict[int, GlobalNode]) -> Optional[GlobalNode]:
    if node.is_end:
        return None
    if id(node) in memo:
        return memo[id(node)]

    direct = node.successor(label)
    independent = all(branch.players != label.players for branch, _ in node.branches)
    assert not (direct is not None and independent), "GE and GI both applicable"
    if direct is not None:
        return direct
    if not independent:
        return None
    for _, child in node.branches:
        if label not in capabilities(child):
            return None

    placeholder = GlobalNode()
    memo[id(node)] = placeholder
    for branch, child in node.branches:
        result = _transform(child, label, memo)
        if result is None:
            return None
        placeholder.add_branch(branch, result)
    return placeholder.seal()


def gt_successor(config: TypeConfiguration, label: CommLabel) -> Optional[TypeConfiguration]:
    target = gt_step(config, label)
    if target is None:
        return None
    return TypeConfiguration(target, apply_label(label, config.queue))


def gt_enabled(config: TypeConfiguration) -> FrozenSet[CommLabel]:
    """Every label with a defined type step; candidates are the capabilities."""
    return frozenset(
        label for label in capabilities(config.global_type)
        if gt_step(config, label) is not None
    )


class GlobalInterner:
    """
    Keeps one representative per bisimilarity class of global nodes, so that
    repeated type steps along a cycle land on the same node.
    """

    def __init__(self):
        self._buckets: Dict[Tuple[FrozenSet, FrozenSet], List[GlobalNode]] = {}
        self.hits = 0

    def intern(self, node: GlobalNode) -> GlobalNode:
        key = (frozenset(node.keys()), capabilities(node))
        bucket = self._buckets.setdefault(key, [])
        for known in bucket:
            if known is node or bisim_equal(known, node):
                self.hits += 1
                return known
        bucket.append(node)
        return node

    def __len__(self) -> int:
        return sum(len(bucket) for bucket in self._buckets.values())


# ═══════════════════════════════════════════════════════════════════════════
# Weight and Soundness
# ═══════════════════════════════════════════════════════════════════════════

def weight(g: GlobalNode, message: Message, strict: bool = False) -> ExtNat:
    """
    Distance in ``g`` to the input consuming ``message``.

    For ``<p, t, q>`` the consumer is ``qp?t``; a ``qp?t'`` branch with
    another tag blocks, as does revisiting a branch. ``strict`` compares
    visited branches up to bisimilarity instead of node identity.
    """
    consumer = CommLabel.input(message.receiver, message.sender, message.tag)
    if strict:
        return _weight_literal(g, consumer, ())
    return _weight_shortest(g, consumer)


def _blocks(label: CommLabel, consumer: CommLabel) -> bool:
    return (
        not label.is_output
        and label.player == consumer.player
        and label.partner == consumer.partner
        and label.tag != consumer.tag
    )


def _weight_shortest(g: GlobalNode, consumer: CommLabel) -> ExtNat:
    # minimum over branch-simple paths equals the BFS distance
    seen = {id(g)}
    layer = [g]
    distance = 0
    while layer:
        following = []
        for node in layer:
            for label, child in node.branches:
                if label == consumer:
                    return ExtNat(distance)
                if _blocks(label, consumer) or id(child) in seen:
                    continue
                seen.add(id(child))
                following.append(child)
        layer = following
        distance += 1
    return INFINITY


def _weight_literal(node: GlobalNode, consumer: CommLabel, visited: Tuple[Tuple[CommLabel, GlobalNode], ...]) -> ExtNat:
    best = INFINITY
    for label, child in node.branches:
        if label == consumer:
            return ZERO
        if _blocks(label, consumer):
            continue
        if any(label == seen_label and bisim_equal(child, seen_child) for seen_label, seen_child in visited):
            continue
        best = min(best, _weight_literal(child, consumer, visited + ((label, child),)).succ())
    return best


def is_sound(config: TypeConfiguration, strict: bool = False) -> bool:
    """Every queued message has finite weight in the global type."""
    distinct = set(config.queue.messages())
    return all(weight(config.global_type, m, strict).is_finite for m in distinct)


def unsound_messages(config: TypeConfiguration, strict: bool = False) -> List[Message]:
    return sorted(m for m in set(config.queue.messages()) if not weight(config.global_type, m, strict).is_finite)
