"""
State-space exploration — the reachable fragment of the session LTS.

Breadth-first closure of ``step`` over canonical sessions. Labels are fired
in sorted order, so state numbering and edge order are deterministic.
States whose expansion was cut short by a bound are recorded as truncated.
"""

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from .bounds import ExplorationBounds
from .printer import describe_session
from .session import Session, enabled_labels, step
from .terms import CommLabel

logger = logging.getLogger(__name__)

Edge = Tuple[int, CommLabel, int]


@dataclass
class StateGraph:
    """Explored states (by BFS index), labelled edges, and truncation marks."""
    states: List[Session]
    edges: List[Edge]
    truncated: FrozenSet[int]
    index: Dict[Session, int] = field(repr=False)
    graph: nx.MultiDiGraph = field(repr=False)

    @property
    def initial(self) -> Session:
        return self.states[0]

    def __len__(self) -> int:
        return len(self.states)

    def edge_set(self) -> FrozenSet[Tuple[Session, CommLabel, Session]]:
        return frozenset((self.states[i], label, self.states[j]) for i, label, j in self.edges)

    def trace_to(self, target: int, source: int = 0) -> List[CommLabel]:
        """Labels along a shortest path from ``source`` to ``target``."""
        path = nx.shortest_path(self.graph, source, target)
        labels = []
        for u, v in zip(path, path[1:]):
            label = min(data["label"] for data in self.graph.get_edge_data(u, v).values())
            labels.append(label)
        return labels

    def reaches_truncated(self, state: int) -> bool:
        if not self.truncated:
            return False
        region = nx.descendants(self.graph, state) | {state}
        return not region.isdisjoint(self.truncated)

    # ── Export ───────────────────────────────────────────────────────────

    def to_document(self) -> Dict:
        return {
            "states": [
                {"id": i, "session": describe_session(s), "final": s.is_final}
                for i, s in enumerate(self.states)
            ],
            "edges": [
                {"source": i, "label": str(label), "target": j}
                for i, label, j in self.edges
            ],
            "initial": 0,
            "truncated": sorted(self.truncated),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False)

    def to_dot(self) -> str:
        lines = ["digraph session {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
        for i, s in enumerate(self.states):
            attrs = [f'label="{_dot_escape(describe_session(s))}"']
            if i == 0:
                attrs.append("peripheries=2")
            if i in self.truncated:
                attrs.append("style=dashed")
            lines.append(f"  s{i} [{', '.join(attrs)}];")
        for i, label, j in self.edges:
            lines.append(f'  s{i} -> s{j} [label="{_dot_escape(dot_label(label))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def dot_label(label: CommLabel) -> str:
    """Edge text: ``p->q!t`` for outputs, ``p<-q?t`` for inputs."""
    arrow = "->" if label.is_output else "<-"
    return f"{label.player}{arrow}{label.partner}{label.kind.value}{label.tag}"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def explore(session: Session, bounds: Optional[ExplorationBounds] = None) -> StateGraph:
    """Breadth-first exploration of every session reachable from ``session``."""
    bounds = bounds or ExplorationBounds()
    states: List[Session] = [session]
    index: Dict[Session, int] = {session: 0}
    edges: List[Edge] = []
    truncated = set()
    graph = nx.MultiDiGraph()
    graph.add_node(0)
    frontier = deque([0])

    while frontier:
        current = frontier.popleft()
        source = states[current]
        for label in sorted(enabled_labels(source)):
            successor = step(source, label)
            if successor.queue.max_channel_length() > bounds.max_queue:
                truncated.add(current)
                continue
            target = index.get(successor)
            if target is None:
                if len(states) >= bounds.max_states:
                    truncated.add(current)
                    continue
                target = len(states)
                states.append(successor)
                index[successor] = target
                graph.add_node(target)
                frontier.append(target)
            edges.append((current, label, target))
            graph.add_edge(current, target, key=label, label=label)

    if truncated:
        logger.warning(
            "Exploration truncated at %d state(s) (%d states, bounds: states=%d, queue=%d)",
            len(truncated), len(states), bounds.max_states, bounds.max_queue,
        )
    else:
        logger.debug("Explored %d states, %d edges", len(states), len(edges))
    return StateGraph(states, edges, frozenset(truncated), index, graph)
