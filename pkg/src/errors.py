"""
Error types raised while reading, resolving and running session programs.

Semantic partiality (a label that cannot fire, an undefined type step) is
returned as ``None`` by the semantics modules; the exceptions here are for
malformed input and misuse.
"""

from typing import Optional


class MpsError(ValueError):
    """Base class for all verifier errors."""


class DslSyntaxError(MpsError):
    """Malformed DSL text."""

    def __init__(self, message: str, line: int, column: int, source: Optional[str] = None):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class DuplicateDefinition(MpsError):
    """The same name is declared twice in one program."""


class UndefinedName(MpsError):
    """A reference to a name with no declaration."""


class UnguardedRecursion(MpsError):
    """A definition reaches itself without passing through a prefix."""


class DistinctPrefixViolation(MpsError):
    """Two branches of one process choice carry the same prefix."""


class DuplicateGlobalLabel(MpsError):
    """Two branches of one global choice carry the same label."""


class DuplicateParticipant(MpsError):
    """A participant is bound twice in one network."""


class TraceError(MpsError):
    """A trace label cannot fire at the given position."""

    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(message)


class PreconditionViolation(MpsError):
    """An oracle was invoked on inputs that do not satisfy its precondition."""


class UsageError(MpsError):
    """Invalid command-line usage."""
