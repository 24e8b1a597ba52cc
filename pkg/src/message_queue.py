"""
Message queues in canonical form.

A queue is kept as one FIFO per ordered (sender, receiver) pair. Messages on
different pairs commute, so two queues that differ only by such swaps are
the same value here and compare equal.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .terms import CommLabel

Channel = Tuple[str, str]


@dataclass(frozen=True, order=True)
class Message:
    """A queued message ``<sender, tag, receiver>``."""
    sender: str
    tag: str
    receiver: str

    def __str__(self) -> str:
        return f"<{self.sender}, {self.tag}, {self.receiver}>"


@dataclass(frozen=True)
class Queue:
    """Canonical queue: sorted (channel, tags) pairs, empty channels absent."""
    channels: Tuple[Tuple[Channel, Tuple[str, ...]], ...] = ()

    # ── Construction ─────────────────────────────────────────────────────

    @classmethod
    def from_messages(cls, messages: Iterable[Message]) -> "Queue":
        queue = EMPTY_QUEUE
        for m in messages:
            queue = queue.push(m.sender, m.receiver, m.tag)
        return queue

    @classmethod
    def _from_dict(cls, table: Dict[Channel, Tuple[str, ...]]) -> "Queue":
        return cls(tuple(sorted((ch, tags) for ch, tags in table.items() if tags)))

    def _as_dict(self) -> Dict[Channel, Tuple[str, ...]]:
        return dict(self.channels)

    # ── Channel Operations ───────────────────────────────────────────────

    def push(self, sender: str, receiver: str, tag: str) -> "Queue":
        table = self._as_dict()
        table[(sender, receiver)] = table.get((sender, receiver), ()) + (tag,)
        return Queue._from_dict(table)

    def channel(self, sender: str, receiver: str) -> Tuple[str, ...]:
        for ch, tags in self.channels:
            if ch == (sender, receiver):
                return tags
        return ()

    def head(self, sender: str, receiver: str) -> Optional[str]:
        tags = self.channel(sender, receiver)
        return tags[0] if tags else None

    def pop(self, sender: str, receiver: str) -> "Queue":
        table = self._as_dict()
        table[(sender, receiver)] = table[(sender, receiver)][1:]
        return Queue._from_dict(table)

    # ── Inspection ───────────────────────────────────────────────────────

    @property
    def is_empty(self) -> bool:
        return not self.channels

    def __len__(self) -> int:
        return sum(len(tags) for _, tags in self.channels)

    def max_channel_length(self) -> int:
        return max((len(tags) for _, tags in self.channels), default=0)

    def messages(self) -> List[Message]:
        """Every queued message, channel by channel, oldest first."""
        return [Message(s, tag, r) for (s, r), tags in self.channels for tag in tags]

    def to_dsl(self) -> str:
        return "[" + ", ".join(f"<{m.sender}, {m.tag}, {m.receiver}>" for m in self.messages()) + "]"

    def __str__(self) -> str:
        return self.to_dsl()


EMPTY_QUEUE = Queue()


def apply_label(label: CommLabel, queue: Queue) -> Optional[Queue]:
    """
    Queue effect of a label.

    ``pq!t`` appends t to channel (p, q); ``pq?t`` removes the head of
    channel (q, p) when it is t. Returns None when the input cannot fire.
    """
    if label.is_output:
        return queue.push(label.player, label.partner, label.tag)
    if queue.head(label.partner, label.player) != label.tag:
        return None
    return queue.pop(label.partner, label.player)
