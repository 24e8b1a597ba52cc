"""
Resolver — turns parsed declarations into regular term graphs.

Every named definition becomes exactly one node; recursive references become
back-edges. Resolution validates guardedness and the distinctness conditions
on choices, and builds the declared sessions.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Set, Tuple, Type

from .errors import (
    DistinctPrefixViolation,
    DuplicateGlobalLabel,
    DuplicateParticipant,
    UndefinedName,
    UnguardedRecursion,
)
from .message_queue import Queue
from .parser import Program, Term, TermEnd, TermRef, TermSum, parse_program
from .session import Network, Session
from .terms import END, TERMINATED, GlobalNode, ProcessNode, TermNode

logger = logging.getLogger(__name__)


@dataclass
class ResolvedProgram:
    """Resolved graphs by declaration name."""
    processes: Dict[str, ProcessNode] = field(default_factory=dict)
    globals: Dict[str, GlobalNode] = field(default_factory=dict)
    sessions: Dict[str, Session] = field(default_factory=dict)
    checks: List[Tuple[str, str]] = field(default_factory=list)
    source: str = ""

    def merge(self, other: "ResolvedProgram"):
        self.processes.update(other.processes)
        self.globals.update(other.globals)
        self.sessions.update(other.sessions)
        self.checks.extend(other.checks)


class _Builder:
    """Resolves one namespace of definitions (processes or global types)."""

    def __init__(
        self,
        definitions: Dict[str, Term],
        node_type: Type[TermNode],
        terminal: TermNode,
        duplicate_error: Type[Exception],
        describe: Callable,
    ):
        self.definitions = definitions
        self.node_type = node_type
        self.terminal = terminal
        self.duplicate_error = duplicate_error
        self.describe = describe
        self.resolved: Dict[str, TermNode] = {}

    def resolve_name(self, name: str, aliasing: Tuple[str, ...] = ()) -> TermNode:
        if name in self.resolved:
            return self.resolved[name]
        if name in aliasing:
            cycle = " -> ".join(aliasing + (name,))
            raise UnguardedRecursion(f"unguarded recursion: {cycle}")
        if name not in self.definitions:
            raise UndefinedName(f"undefined name {name!r}")
        body = self.definitions[name]
        if isinstance(body, TermRef):
            node = self.resolve_ref(body, aliasing + (name,))
        elif isinstance(body, TermEnd):
            node = self.terminal
        else:
            node = self.node_type(name)
            self.resolved[name] = node
            self._fill(node, body)
        self.resolved[name] = node
        return node

    def resolve_ref(self, ref: TermRef, aliasing: Tuple[str, ...]) -> TermNode:
        if ref.name not in self.definitions:
            raise UndefinedName(f"undefined name {ref.name!r} at {ref.line}:{ref.column}")
        return self.resolve_name(ref.name, aliasing)

    def build(self, term: Term) -> TermNode:
        """Resolve an anonymous term (all references in it are guarded or top-level)."""
        if isinstance(term, TermEnd):
            return self.terminal
        if isinstance(term, TermRef):
            return self.resolve_ref(term, ())
        node = self.node_type()
        self._fill(node, term)
        return node

    def _fill(self, node: TermNode, term: TermSum):
        seen: Set = set()
        for key, cont in term.branches:
            if key in seen:
                raise self.duplicate_error(
                    f"{self.describe(key)} occurs twice in the choice at {term.line}:{term.column}"
                )
            seen.add(key)
            node.add_branch(key, self.build(cont))
        node.seal()


def resolve(program: Program) -> ResolvedProgram:
    """Resolve every declaration of ``program``."""
    processes = _Builder(
        program.processes, ProcessNode, TERMINATED, DistinctPrefixViolation,
        lambda prefix: f"prefix {prefix}",
    )
    globals_ = _Builder(
        program.globals, GlobalNode, END, DuplicateGlobalLabel,
        lambda label: f"label {label.to_dsl()}",
    )
    result = ResolvedProgram(checks=list(program.checks), source=program.source or "")

    for name in program.processes:
        result.processes[name] = processes.resolve_name(name)
    for name in program.globals:
        result.globals[name] = globals_.resolve_name(name)

    for name, decl in program.sessions.items():
        bindings: Dict[str, ProcessNode] = {}
        for participant, term, line, column in decl.bindings:
            if participant in bindings:
                raise DuplicateParticipant(
                    f"participant {participant!r} bound twice in session {name!r} at {line}:{column}"
                )
            bindings[participant] = processes.build(term)
        result.sessions[name] = Session(Network.of(bindings), Queue.from_messages(decl.messages))

    for g_name, s_name in result.checks:
        if g_name not in result.globals:
            raise UndefinedName(f"check pragma names unknown global type {g_name!r}")
        if s_name not in result.sessions:
            raise UndefinedName(f"check pragma names unknown session {s_name!r}")

    logger.debug(
        "Resolved %d processes, %d globals, %d sessions",
        len(result.processes), len(result.globals), len(result.sessions),
    )
    return result


def load_program(text: str, source: Optional[str] = None) -> ResolvedProgram:
    """Parse and resolve DSL text."""
    return resolve(parse_program(text, source))
