"""
Pretty printer — renders term graphs and sessions back to DSL text.

Nodes that close a cycle or are shared get a definition of their own
(reusing the declaration name when there is one); everything else is
printed inline. Branches are printed in sorted order.
"""

import logging
from typing import Dict, Iterable, List, Optional, Set

from .parser import KEYWORDS
from .session import Session
from .terms import GlobalNode, ProcessNode, TermNode, reachable

logger = logging.getLogger(__name__)


class _Namer:
    """Assigns declaration names to the nodes that need one."""

    def __init__(self, roots: Iterable[TermNode], reserved: Iterable[str] = ()):
        self.names: Dict[int, str] = {}
        self.order: List[TermNode] = []
        self.used: Set[str] = set(KEYWORDS) | set(reserved)
        self._counter = 0
        for root in roots:
            self._scan(root)

    def _scan(self, root: TermNode):
        indegree: Dict[int, int] = {}
        for node in reachable(root):
            for _, child in node.branches:
                indegree[id(child)] = indegree.get(id(child), 0) + 1
        on_stack: Set[int] = set()
        done: Set[int] = set()
        stack = [(root, iter(root.branches))]
        on_stack.add(id(root))
        while stack:
            node, children = stack[-1]
            advanced = False
            for _, child in children:
                if child.is_terminal:
                    continue
                if id(child) in on_stack or indegree.get(id(child), 0) > 1:
                    self.name_of(child)
                if id(child) not in on_stack and id(child) not in done:
                    on_stack.add(id(child))
                    stack.append((child, iter(child.branches)))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_stack.discard(id(node))
                done.add(id(node))

    def name_of(self, node: TermNode, preferred: Optional[str] = None) -> str:
        if id(node) in self.names:
            return self.names[id(node)]
        candidate = preferred or node.name
        if not candidate or candidate in self.used:
            prefix = "G" if isinstance(node, GlobalNode) else "P"
            while True:
                self._counter += 1
                candidate = f"{prefix}_{self._counter}"
                if candidate not in self.used:
                    break
        self.used.add(candidate)
        self.names[id(node)] = candidate
        self.order.append(node)
        return candidate

    def has_name(self, node: TermNode) -> bool:
        return id(node) in self.names


def _render(node: TermNode, namer: _Namer, defining: Optional[TermNode] = None, nested: bool = False) -> str:
    if node.is_terminal:
        return "End" if isinstance(node, GlobalNode) else "end"
    if node is not defining and namer.has_name(node):
        return namer.names[id(node)]
    parts = []
    for key, child in node.sorted_branches():
        head = key.to_dsl() if isinstance(node, GlobalNode) else str(key)
        parts.append(f"{head} . {_render(child, namer, nested=True)}")
    text = " + ".join(parts)
    return f"({text})" if nested and len(parts) > 1 else text


def render_term(node: TermNode) -> str:
    """Single-expression rendering; cycles appear as references to fresh names."""
    return _render(node, _Namer([node]), defining=node)


def _definitions(namer: _Namer) -> List[str]:
    lines = []
    for node in namer.order:
        keyword = "global" if isinstance(node, GlobalNode) else "participant"
        lines.append(f"{keyword} {namer.names[id(node)]} = {_render(node, namer, defining=node)}")
    return lines


def pretty_print(node: TermNode, name: Optional[str] = None) -> str:
    """
    Render ``node`` as a program whose first declaration, ``name``, denotes it.
    """
    default = "G" if isinstance(node, GlobalNode) else "P"
    namer = _Namer([])
    namer.name_of(node, preferred=name or node.name or default)
    namer._scan(node)
    return "\n".join(_definitions(namer)) + "\n"


def pretty_print_session(session: Session, name: str = "S") -> str:
    """Render ``session`` as participant declarations plus one session declaration."""
    processes: List[ProcessNode] = [node for _, node in session.network.bindings]
    namer = _Namer(processes, reserved=[name])
    lines = _definitions(namer)
    bindings = [f"{p} :: {_render(node, namer)}" for p, node in session.network.bindings]
    if not bindings:
        idle = sorted({m.receiver for m in session.queue.messages()}) or ["nobody"]
        bindings = [f"{p} :: end" for p in idle]
    lines.append(f"session {name} = {' || '.join(bindings)} with {session.queue.to_dsl()}")
    return "\n".join(lines) + "\n"


def describe_session(session: Session) -> str:
    """One-line session rendering for logs, DOT labels and reports."""
    namer = _Namer([node for _, node in session.network.bindings])
    bindings = [f"{p} :: {_render(node, namer)}" for p, node in session.network.bindings]
    network = " || ".join(bindings) if bindings else "(final)"
    return f"{network} with {session.queue.to_dsl()}"
