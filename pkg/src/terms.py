"""
Regular terms — processes and global types as finite cyclic graphs.

A resolved process or global type is a graph of ``TermNode`` vertices whose
outgoing edges are the branches of a choice. Nodes are built unsealed,
filled with branches, then sealed; after sealing they are immutable and
compared by identity. Equality of the denoted coinductive terms is
``bisim_equal``.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from .errors import UsageError

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# Prefixes and Communication Labels
# ═══════════════════════════════════════════════════════════════════════════

class Kind(str, Enum):
    """Direction of an action. Outputs sort before inputs."""
    OUTPUT = "!"
    INPUT = "?"


@dataclass(frozen=True, order=True)
class ActionPrefix:
    """A process prefix ``peer!tag`` or ``peer?tag``."""
    kind: Kind
    peer: str
    tag: str

    def __str__(self) -> str:
        return f"{self.peer}{self.kind.value}{self.tag}"


@dataclass(frozen=True, order=True)
class CommLabel:
    """
    A communication label.

    ``pq!t``: player p sends t to partner q.
    ``pq?t``: player p reads from the queue the t sent by partner q.
    """
    kind: Kind
    player: str
    partner: str
    tag: str

    @property
    def players(self) -> FrozenSet[str]:
        return frozenset((self.player,))

    @property
    def is_output(self) -> bool:
        return self.kind is Kind.OUTPUT

    @property
    def prefix(self) -> ActionPrefix:
        """The process prefix the player must offer to fire this label."""
        return ActionPrefix(self.kind, self.partner, self.tag)

    @classmethod
    def of(cls, player: str, prefix: ActionPrefix) -> "CommLabel":
        return cls(prefix.kind, player, prefix.peer, prefix.tag)

    @classmethod
    def output(cls, player: str, partner: str, tag: str) -> "CommLabel":
        return cls(Kind.OUTPUT, player, partner, tag)

    @classmethod
    def input(cls, player: str, partner: str, tag: str) -> "CommLabel":
        return cls(Kind.INPUT, player, partner, tag)

    def to_dsl(self) -> str:
        """Render as a global-type label, e.g. ``c s ! req``."""
        return f"{self.player} {self.partner} {self.kind.value} {self.tag}"

    def __str__(self) -> str:
        arrow = ">" if self.is_output else "<"
        return f"{self.player}{arrow}{self.partner}{self.kind.value}{self.tag}"


IDENTIFIER = r"[A-Za-z][A-Za-z0-9_]*"

_LABEL_RE = re.compile(
    rf"^\s*({IDENTIFIER})\s*([<>])\s*({IDENTIFIER})\s*([!?])\s*({IDENTIFIER})\s*$"
)


def parse_label(text: str) -> CommLabel:
    """Read a label in the command-line form ``p>q!t`` (output) or ``p<q?t`` (input)."""
    match = _LABEL_RE.match(text)
    if match is None:
        raise UsageError(f"malformed label '{text.strip()}' (expected p>q!t or p<q?t)")
    player, arrow, partner, mark, tag = match.groups()
    if (arrow == ">") != (mark == "!"):
        raise UsageError(f"label '{text.strip()}' mixes directions: use > with ! and < with ?")
    return CommLabel(Kind(mark), player, partner, tag)


def format_label(label: CommLabel) -> str:
    return str(label)


def parse_trace(text: str) -> Tuple[CommLabel, ...]:
    """Comma-separated labels; an empty string is the empty trace."""
    return tuple(parse_label(part) for part in text.split(",") if part.strip())


# ═══════════════════════════════════════════════════════════════════════════
# Graph Nodes
# ═══════════════════════════════════════════════════════════════════════════

BranchKey = Union[ActionPrefix, CommLabel]


class TermNode:
    """
    A vertex of a regular term graph.

    A sealed node with no branches is the terminal term (``end`` / ``End``).
    """

    __slots__ = ("name", "_branches", "_sealed", "_cache")

    def __init__(self, name: Optional[str] = None):
        self.name = name
        self._branches: list = []
        self._sealed = False
        self._cache: Dict[str, FrozenSet] = {}

    # ── Construction ─────────────────────────────────────────────────────

    def add_branch(self, key: BranchKey, child: "TermNode"):
        if self._sealed:
            raise RuntimeError("Node is sealed and cannot take more branches")
        self._branches.append((key, child))

    def seal(self) -> "TermNode":
        if not self._sealed:
            self._branches = tuple(self._branches)
            self._sealed = True
        return self

    # ── Access ───────────────────────────────────────────────────────────

    @property
    def sealed(self) -> bool:
        return self._sealed

    @property
    def branches(self) -> Tuple[Tuple[BranchKey, "TermNode"], ...]:
        return tuple(self._branches)

    @property
    def is_terminal(self) -> bool:
        return self._sealed and not self._branches

    def keys(self) -> List[BranchKey]:
        return [k for k, _ in self._branches]

    def successor(self, key: BranchKey) -> Optional["TermNode"]:
        for k, child in self._branches:
            if k == key:
                return child
        return None

    def sorted_branches(self) -> List[Tuple[BranchKey, "TermNode"]]:
        return sorted(self._branches, key=lambda kv: kv[0])

    def __repr__(self):
        label = self.name or f"#{id(self) & 0xFFFF:04x}"
        if self.is_terminal:
            return f"{type(self).__name__}(end)"
        return f"{type(self).__name__}({label}, {len(self._branches)} branches)"


class ProcessNode(TermNode):
    """Process vertex: terminated, or a choice over action prefixes."""
    __slots__ = ()

    @property
    def is_terminated(self) -> bool:
        return self.is_terminal


class GlobalNode(TermNode):
    """Global-type vertex: ``End``, or a choice over communication labels."""
    __slots__ = ()

    @property
    def is_end(self) -> bool:
        return self.is_terminal


TERMINATED = ProcessNode().seal()
END = GlobalNode().seal()


# ═══════════════════════════════════════════════════════════════════════════
# Structural Operations
# ═══════════════════════════════════════════════════════════════════════════

def reachable(node: TermNode) -> List[TermNode]:
    """All nodes reachable from ``node`` (itself included), in DFS preorder."""
    seen = {id(node)}
    order = [node]
    stack = [node]
    while stack:
        current = stack.pop()
        for _, child in reversed(current.branches):
            if id(child) not in seen:
                seen.add(id(child))
                order.append(child)
                stack.append(child)
    return order


def _collect(node: TermNode, cache_key: str, extract) -> FrozenSet:
    cached = node._cache.get(cache_key)
    if cached is not None:
        return cached
    nodes = reachable(node)
    result = frozenset(item for n in nodes for key, _ in n.branches for item in extract(key))
    if all(n.sealed for n in nodes):
        node._cache[cache_key] = result
    return result


def players_of_global(g: GlobalNode) -> FrozenSet[str]:
    """players(G): every player of a label reachable from ``g``."""
    return _collect(g, "players", lambda label: label.players)


def capabilities(g: GlobalNode) -> FrozenSet[CommLabel]:
    """cp(G): every label reachable from ``g``."""
    return _collect(g, "cp", lambda label: (label,))


def bisim_equal(a: TermNode, b: TermNode) -> bool:
    """
    True iff ``a`` and ``b`` denote the same coinductive term, up to the
    order of summands.

    Branch keys are pairwise distinct within a choice, so each branch of one
    side has at most one partner on the other; bisimilarity reduces to a
    check over the reachable node pairs.
    """
    if isinstance(a, ProcessNode) != isinstance(b, ProcessNode):
        return False
    seen = set()
    work = [(a, b)]
    while work:
        x, y = work.pop()
        if x is y or (id(x), id(y)) in seen:
            continue
        seen.add((id(x), id(y)))
        bx = dict(x.branches)
        by = dict(y.branches)
        if bx.keys() != by.keys():
            return False
        for key, child in bx.items():
            work.append((child, by[key]))
    return True
