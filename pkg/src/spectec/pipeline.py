"""End-to-end stages shared by the CLI and the test harness."""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import Diagnostic, SpecError
from .el.ast import ElScript
from .el.lexer import tokenize
from .el.parser import parse_tokens
from .il.ast import IlScript
from .il.elaborate import elaborate_with_diagnostics


@dataclass
class Checked:
    el: ElScript
    il: Optional[IlScript]
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.il is not None and not any(d.is_error for d in self.diagnostics)


def parse_sources(sources) -> tuple:
    """Parse ``(text, file_id)`` pairs, concatenating in order; returns (script, diags)."""
    script = ElScript()
    diags: list = []
    for text, file_id in sources:
        try:
            part, errors = parse_tokens(tokenize(text, file_id), file_id)
        except SpecError as e:  # lexical errors
            diags.extend(e.diagnostics)
            continue
        diags.extend(errors)
        script = script + part
    return script, diags


def read_sources(paths) -> list:
    """Read files as UTF-8; raises FileNotFoundError for a missing path."""
    out = []
    for p in paths:
        p = pathlib.Path(p)
        if not p.is_file():
            raise FileNotFoundError(str(p))
        out.append((p.read_text(encoding="utf-8"), str(p)))
    return out


def check_sources(sources) -> Checked:
    script, diags = parse_sources(sources)
    if any(d.is_error for d in diags):
        return Checked(script, None, sorted(diags, key=Diagnostic.sort_key))
    il, more = elaborate_with_diagnostics(script)
    diags = sorted(diags + more, key=Diagnostic.sort_key)
    return Checked(script, None if any(d.is_error for d in diags) else il, diags)


def check_paths(paths) -> Checked:
    return check_sources(read_sources(paths))


def build(paths=None):
    """Check, animate and compile; returns (IlScript, algorithms, Interpreter).

    Raises SpecError if the sources have errors.
    """
    from .al.animate import animate
    from .corpus import spec_sources
    from .runtime.interp import Interpreter

    checked = check_paths(paths if paths else spec_sources())
    if not checked.ok:
        raise SpecError([d for d in checked.diagnostics if d.is_error])
    algorithms = animate(checked.il)
    return checked.il, algorithms, Interpreter(algorithms, checked.il)
