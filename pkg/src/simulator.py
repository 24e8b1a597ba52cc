"""
Simulator — runs a session under a seeded random scheduler or a given trace.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from .config import Config
from .errors import TraceError, UsageError
from .session import Session, Trace, enabled_labels, step
from .terms import CommLabel

logger = logging.getLogger(__name__)


def random_schedule(s: Session, steps: int, seed: Optional[int] = None) -> Trace:
    """
    Fire up to ``steps`` labels, each drawn uniformly from the sorted enabled
    labels. Stops early when nothing is enabled.
    """
    if steps < 0:
        raise UsageError(f"steps must be non-negative, got {steps}")
    rng = np.random.default_rng(Config.RANDOM_SEED if seed is None else seed)
    trace: List[CommLabel] = []
    current = s
    for _ in range(steps):
        labels = sorted(enabled_labels(current))
        if not labels:
            logger.debug("No enabled label after %d steps", len(trace))
            break
        label = labels[int(rng.integers(len(labels)))]
        trace.append(label)
        current = step(current, label)
    return tuple(trace)


def replay(s: Session, trace: Sequence[CommLabel]) -> List[Session]:
    """Every state along ``trace``, starting with ``s``; raises TraceError on a label that cannot fire."""
    states = [s]
    for index, label in enumerate(trace):
        successor = step(states[-1], label)
        if successor is None:
            raise TraceError(f"label {label} cannot fire at index {index}", index)
        states.append(successor)
    return states
