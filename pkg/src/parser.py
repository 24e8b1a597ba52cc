"""
Parser for the ``.mps`` session DSL.

Hand-written tokenizer and recursive-descent parser producing surface
declarations. Names are not resolved here; see ``resolver``.

    participant P = s!req . (s?res . P + s?halt . s?res . end)
    global G = c s ! req . s c ? req . G
    session CS = c :: P || s :: Q with []

Prefix (``.``) binds tighter than choice (``+``). A comment line of the form
``# check G S`` records a typing judgment to run in batch mode.
"""

import re
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .errors import DslSyntaxError, DuplicateDefinition
from .message_queue import Message
from .terms import IDENTIFIER, ActionPrefix, CommLabel, Kind

logger = logging.getLogger(__name__)

KEYWORDS = {"participant", "global", "session", "with", "end", "End"}

_TOKEN_SPEC = [
    # a whole line holding exactly two names; anything else after # is a comment
    ("PRAGMA", rf"^[ \t]*#[ \t]*check[ \t]+{IDENTIFIER}[ \t]+{IDENTIFIER}[ \t\r]*$"),
    ("COMMENT", r"#[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("PAR", r"\|\|"),
    ("BIND", r"::"),
    ("NAME", IDENTIFIER),
    ("OP", r"[=+.!?()\[\]<>,]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC), re.MULTILINE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


# ═══════════════════════════════════════════════════════════════════════════
# Surface Syntax
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class TermEnd:
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class TermRef:
    name: str
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class TermSum:
    """A choice; keys are ActionPrefix (processes) or CommLabel (global types)."""
    branches: Tuple[Tuple[Union[ActionPrefix, CommLabel], "Term"], ...]
    line: int = 0
    column: int = 0


Term = Union[TermEnd, TermRef, TermSum]


@dataclass(frozen=True)
class SessionDecl:
    bindings: Tuple[Tuple[str, Term, int, int], ...]
    messages: Tuple[Message, ...]
    line: int = 0
    column: int = 0


@dataclass
class Program:
    """Parsed declarations, in source order within each kind."""
    processes: Dict[str, Term] = field(default_factory=dict)
    globals: Dict[str, Term] = field(default_factory=dict)
    sessions: Dict[str, SessionDecl] = field(default_factory=dict)
    checks: List[Tuple[str, str]] = field(default_factory=list)
    source: Optional[str] = None


# ═══════════════════════════════════════════════════════════════════════════
# Tokenizer
# ═══════════════════════════════════════════════════════════════════════════

def tokenize(text: str, source: Optional[str] = None) -> Tuple[List[Token], List[Tuple[str, str]]]:
    """Split ``text`` into tokens; also returns ``# check G S`` pragmas."""
    tokens: List[Token] = []
    pragmas: List[Tuple[str, str]] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = match.lastgroup
        value = match.group()
        column = pos - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
        elif kind == "PRAGMA":
            words = value.strip().lstrip("#").split()
            pragmas.append((words[1], words[2]))
        elif kind not in ("SKIP", "COMMENT"):
            tokens.append(Token(kind, value, line, column))
        pos = match.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens, pragmas


# ═══════════════════════════════════════════════════════════════════════════
# Parser
# ═══════════════════════════════════════════════════════════════════════════

class Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str, source: Optional[str] = None):
        self.source = source
        self.tokens, self.pragmas = tokenize(text, source)
        self.pos = 0

    # ── Token Helpers ────────────────────────────────────────────────────

    def _peek(self, offset: int = 0) -> Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def _error(self, message: str, token: Optional[Token] = None):
        token = token or self._peek()
        found = token.text or "end of input"
        raise DslSyntaxError(f"{message} (found {found!r})", token.line, token.column, self.source)

    def _at(self, text: str, offset: int = 0) -> bool:
        token = self._peek(offset)
        return token.kind != "NAME" and token.text == text

    def _expect(self, text: str) -> Token:
        if not self._at(text):
            self._error(f"expected {text!r}")
        token = self._peek()
        self.pos += 1
        return token

    def _keyword(self, word: str) -> bool:
        token = self._peek()
        if token.kind == "NAME" and token.text == word:
            self.pos += 1
            return True
        return False

    def _name(self, what: str = "identifier") -> Token:
        token = self._peek()
        if token.kind != "NAME" or token.text in KEYWORDS:
            self._error(f"expected {what}")
        self.pos += 1
        return token

    def _is_name(self, offset: int = 0) -> bool:
        token = self._peek(offset)
        return token.kind == "NAME" and token.text not in KEYWORDS

    # ── Declarations ─────────────────────────────────────────────────────

    def parse_program(self) -> Program:
        program = Program(source=self.source)
        seen: Dict[str, Token] = {}
        while self._peek().kind != "EOF":
            start = self._peek()
            if self._keyword("participant"):
                kind, table = "participant", program.processes
            elif self._keyword("global"):
                kind, table = "global", program.globals
            elif self._keyword("session"):
                kind, table = "session", program.sessions
            else:
                self._error("expected 'participant', 'global' or 'session'")
            name = self._name(f"{kind} name")
            if name.text in seen:
                first = seen[name.text]
                raise DuplicateDefinition(
                    f"{name.text!r} declared at {name.line}:{name.column} "
                    f"was already declared at {first.line}:{first.column}"
                )
            seen[name.text] = name
            self._expect("=")
            if kind == "participant":
                table[name.text] = self._proc()
            elif kind == "global":
                table[name.text] = self._gtype()
            else:
                table[name.text] = self._session(start)
        program.checks = list(self.pragmas)
        logger.debug(
            "Parsed %d processes, %d globals, %d sessions from %s",
            len(program.processes), len(program.globals), len(program.sessions),
            self.source or "<text>",
        )
        return program

    # ── Processes ────────────────────────────────────────────────────────

    def _proc(self) -> Term:
        return self._sum(self._proc_summand)

    def _proc_summand(self) -> Term:
        token = self._peek()
        if self._keyword("end"):
            return TermEnd(token.line, token.column)
        if self._at("("):
            self.pos += 1
            inner = self._proc()
            self._expect(")")
            return inner
        if self._is_name() and (self._at("!", 1) or self._at("?", 1)):
            peer = self._name("peer")
            kind = Kind(self._peek().text)
            self.pos += 1
            tag = self._name("tag")
            self._expect(".")
            cont = self._proc_summand()
            prefix = ActionPrefix(kind, peer.text, tag.text)
            return TermSum(((prefix, cont),), token.line, token.column)
        if self._is_name():
            self.pos += 1
            return TermRef(token.text, token.line, token.column)
        self._error("expected a process")

    # ── Global Types ─────────────────────────────────────────────────────

    def _gtype(self) -> Term:
        return self._sum(self._gtype_summand)

    def _gtype_summand(self) -> Term:
        token = self._peek()
        if self._keyword("End"):
            return TermEnd(token.line, token.column)
        if self._at("("):
            self.pos += 1
            inner = self._gtype()
            self._expect(")")
            return inner
        if self._is_name() and self._is_name(1):
            player = self._name("player")
            partner = self._name("partner")
            if not (self._at("!") or self._at("?")):
                self._error("expected '!' or '?'")
            kind = Kind(self._peek().text)
            self.pos += 1
            tag = self._name("tag")
            self._expect(".")
            cont = self._gtype_summand()
            label = CommLabel(kind, player.text, partner.text, tag.text)
            return TermSum(((label, cont),), token.line, token.column)
        if self._is_name():
            self.pos += 1
            return TermRef(token.text, token.line, token.column)
        self._error("expected a global type")

    # ── Shared Choice Parsing ────────────────────────────────────────────

    def _sum(self, summand) -> Term:
        first_token = self._peek()
        parts = [summand()]
        while self._at("+"):
            self.pos += 1
            parts.append(summand())
        if len(parts) == 1:
            return parts[0]
        branches = []
        for part in parts:
            if not isinstance(part, TermSum):
                self._error("only prefixed branches can be joined with '+'", first_token)
            branches.extend(part.branches)
        return TermSum(tuple(branches), first_token.line, first_token.column)

    # ── Sessions ─────────────────────────────────────────────────────────

    def _session(self, start: Token) -> SessionDecl:
        bindings = [self._binding()]
        while self._peek().kind == "PAR":
            self.pos += 1
            bindings.append(self._binding())
        if not self._keyword("with"):
            self._error("expected 'with'")
        messages = self._queue()
        return SessionDecl(tuple(bindings), tuple(messages), start.line, start.column)

    def _binding(self) -> Tuple[str, Term, int, int]:
        participant = self._name("participant")
        if self._peek().kind != "BIND":
            self._error("expected '::'")
        self.pos += 1
        return participant.text, self._proc(), participant.line, participant.column

    def _queue(self) -> List[Message]:
        self._expect("[")
        messages: List[Message] = []
        if self._at("]"):
            self.pos += 1
            return messages
        messages.append(self._message())
        while self._at(","):
            self.pos += 1
            messages.append(self._message())
        self._expect("]")
        return messages

    def _message(self) -> Message:
        self._expect("<")
        sender = self._name("sender")
        self._expect(",")
        tag = self._name("tag")
        self._expect(",")
        receiver = self._name("receiver")
        self._expect(">")
        return Message(sender.text, tag.text, receiver.text)


def parse_program(text: str, source: Optional[str] = None) -> Program:
    """Parse DSL text into a ``Program``."""
    return Parser(text, source).parse_program()
