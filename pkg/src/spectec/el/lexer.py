"""Tokenizer for the .spectec DSL."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..diagnostics import Diagnostic, SourceSpan, SpecError

KEYWORDS = frozenset({"syntax", "rule", "def", "relation", "var", "if", "otherwise", "epsilon"})

# Longest symbols first.
SYMBOLS = (
    "=/=", "~>", "--", "|-", "<=", ">=", "≤", "≥",
    "=", "<", ">", "(", ")", "[", "]", "*", "?", "^", "/", ":", ",", "|", ";", "+", "-", ".",
)
_SYMBOL_ALIASES = {"≤": "<=", "≥": ">="}


@dataclass(frozen=True)
class Token:
    kind: str  # KEYWORD, SYMBOL, UPPER, LOWER, DOLLAR, NAT, EOF
    text: str
    span: SourceSpan

    @property
    def base(self) -> str:
        """For LOWER tokens: the name without its ``_k`` subscript."""
        head, sep, _ = self.text.rpartition("_")
        return head if sep and head else self.text

    @property
    def subscript(self) -> Optional[str]:
        head, sep, tail = self.text.rpartition("_")
        return tail if sep and head and tail else None

    def is_(self, kind: str, text: Optional[str] = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def __repr__(self):
        return f"{self.kind}({self.text!r})"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>;;[^\n]*)
  | (?P<dollar>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_.]*)
  | (?P<lower>[a-z][a-z0-9_]*)
  | (?P<nat>[0-9]+)
    """,
    re.VERBOSE,
)


def _position_table(text: str):
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            starts.append(i + 1)
    return starts


def tokenize(source_text: str, file_id: str = "<input>") -> list[Token]:
    """Split DSL text into tokens; raises SpecError (code E-LEX) on bad characters.

    The trailing EOF token is not included.
    """
    text = source_text
    line_starts = _position_table(text)

    def pos(offset: int) -> tuple[int, int]:
        lo, hi = 0, len(line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - line_starts[lo] + 1

    def span(a: int, b: int) -> SourceSpan:
        l1, c1 = pos(a)
        l2, c2 = pos(max(a, b - 1))
        return SourceSpan(file_id, l1, c1, l2, c2)

    tokens: list[Token] = []
    errors: list[Diagnostic] = []
    i, n = 0, len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m:
            kind = m.lastgroup
            j = m.end()
            word = m.group()
            if kind == "upper":
                # a trailing "." belongs to the rule-id syntax, not the name
                while word.endswith("."):
                    word = word[:-1]
                    j -= 1
                tokens.append(Token("UPPER", word, span(i, j)))
            elif kind == "lower":
                tokens.append(Token("KEYWORD" if word in KEYWORDS else "LOWER", word, span(i, j)))
            elif kind == "dollar":
                tokens.append(Token("DOLLAR", word[1:], span(i, j)))
            elif kind == "nat":
                tokens.append(Token("NAT", word, span(i, j)))
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYMBOL", _SYMBOL_ALIASES.get(sym, sym), span(i, i + len(sym))))
                i += len(sym)
                break
        else:
            errors.append(
                Diagnostic("error", "E-LEX", f"unexpected character {text[i]!r}", span(i, i + 1))
            )
            i += 1
    if errors:
        raise SpecError(errors)
    return tokens
