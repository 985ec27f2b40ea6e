"""Source spans and diagnostics shared by every pipeline stage."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def __post_init__(self):
        if self.line_end < self.line_start or (
            self.line_end == self.line_start and self.col_end < self.col_start
        ):
            raise ValueError(f"inverted span {self}")

    def to(self, other: "SourceSpan") -> "SourceSpan":
        """Smallest span covering ``self`` and ``other`` (same file)."""
        start = min((self.line_start, self.col_start), (other.line_start, other.col_start))
        end = max((self.line_end, self.col_end), (other.line_end, other.col_end))
        return SourceSpan(self.file, start[0], start[1], end[0], end[1])

    def contains(self, other: "SourceSpan") -> bool:
        return (
            self.file == other.file
            and (self.line_start, self.col_start) <= (other.line_start, other.col_start)
            and (other.line_end, other.col_end) <= (self.line_end, self.col_end)
        )

    def __str__(self):
        return f"{self.file}:{self.line_start}:{self.col_start}"


NO_SPAN = SourceSpan("<builtin>", 1, 1, 1, 1)


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: SourceSpan
    notes: list[tuple[str, SourceSpan]] = field(default_factory=list)

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def sort_key(self):
        s = self.span
        return (s.file, s.line_start, s.col_start, self.code, self.message)

    def format(self, color: bool = False) -> str:
        sev = self.severity
        if color:
            sev = ("\x1b[31m" if self.is_error else "\x1b[33m") + sev + "\x1b[0m"
        lines = [f"{self.span}: {sev}[{self.code}]: {self.message}"]
        for text, span in self.notes:
            lines.append(f"{span}: note: {text}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        s = self.span
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "file": s.file,
            "line": s.line_start,
            "col": s.col_start,
            "end_line": s.line_end,
            "end_col": s.col_end,
        }


class SpecError(Exception):
    """Raised by a stage that cannot continue; carries all diagnostics found."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = sorted(diagnostics, key=Diagnostic.sort_key)
        super().__init__("\n".join(d.format() for d in self.diagnostics))


def use_color(stream=None) -> bool:
    mode = os.environ.get("SPECTEC_COLOR", "auto")
    if mode == "never":
        return False
    if mode == "always":
        return True
    stream = stream or sys.stderr
    return hasattr(stream, "isatty") and stream.isatty()


def emit(diagnostics, stream=None, as_json: bool = False) -> None:
    stream = stream or sys.stderr
    color = use_color(stream) and not as_json
    for d in sorted(diagnostics, key=Diagnostic.sort_key):
        if as_json:
            stream.write(json.dumps(d.to_json(), sort_keys=True) + "\n")
        else:
            stream.write(d.format(color) + "\n")
