"""Run ``.minwast`` conformance scripts against the extracted interpreter."""

from __future__ import annotations

import pathlib
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .corpus.minwast import (AssertReturn, AssertTrap, Invoke, Module, TestParseError,
                             format_const, parse_test_script)
from .runtime.interp import ArgumentMismatch, Exhausted, InterpreterBug, Trap
from .runtime.module import ValidationError, instantiate, value
from .runtime.numerics import CANONICAL_NAN, is_nan

REPORT_VERSION = "1"


class HarnessError(Exception):
    """A script could not be run at all (bad syntax, invalid module, unknown export)."""


@dataclass
class Failure:
    command: int  # index in the script
    line: int
    invoke: str
    expected: list
    actual: list
    message: str = ""

    def to_json(self) -> dict:
        return {"command": self.command, "line": self.line, "invoke": self.invoke,
                "expected": self.expected, "actual": self.actual, "message": self.message}

    def format(self, path: str) -> str:
        exp = " ".join(self.expected) or "(no values)"
        act = " ".join(self.actual) or "(no values)"
        extra = f" ({self.message})" if self.message else ""
        return f"{path}:{self.line}: {self.invoke}: expected {exp}, got {act}{extra}"


@dataclass
class FileReport:
    path: str
    total: int = 0
    passed: int = 0
    failed: int = 0
    trapped: int = 0  # assert_trap commands that passed
    seconds: float = 0.0
    failures: list = field(default_factory=list)
    coverage: Counter = field(default_factory=Counter)  # instruction -> assertions exercising it

    def to_json(self, timing: bool = True) -> dict:
        out = {"path": self.path, "total": self.total, "passed": self.passed,
               "failed": self.failed, "trapped_as_expected": self.trapped,
               "failures": [f.to_json() for f in self.failures]}
        if timing:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class RunReport:
    files: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def total(self) -> int:
        return sum(f.total for f in self.files)

    @property
    def passed(self) -> int:
        return sum(f.passed for f in self.files)

    @property
    def failed(self) -> int:
        return sum(f.failed for f in self.files)

    def coverage(self) -> Counter:
        c: Counter = Counter()
        for f in self.files:
            c.update(f.coverage)
        return c

    def summary(self) -> str:
        return f"{self.passed}/{self.total} assertions passed in {self.seconds:.3f}s"

    def to_json(self, timing: bool = True) -> dict:
        out = {"version": REPORT_VERSION, "total": self.total, "passed": self.passed,
               "failed": self.failed, "files": [f.to_json(timing) for f in self.files]}
        if timing:
            out["seconds"] = round(self.seconds, 6)
        return out


# -- comparison -------------------------------------------------------------

def _describe(nt: str, bits) -> str:
    return f"{nt}:{format_const(nt, bits)}"


def matches(expected, actual) -> bool:
    """Compare one expected ``(nt, bits|nan class)`` with an actual ``(nt, bits)``."""
    nt, want = expected
    got_nt, got = actual
    if nt != got_nt:
        return False
    if want == "nan:canonical":
        key = nt.upper()
        return got & ~(1 << (32 if key == "F32" else 64) - 1) == CANONICAL_NAN[key]
    if want == "nan:arithmetic":
        key = nt.upper()
        return is_nan(key, got) and got & CANONICAL_NAN[key] == CANONICAL_NAN[key]
    return want == got


def _runtime_values(result) -> list:
    return [(v[1][0].lower(), v[2]) for v in result.values]


# -- running ----------------------------------------------------------------

def run_script(interp, script, path: str = "<script>") -> FileReport:
    report = FileReport(path)
    cfg = None
    exports: dict = {}
    start = time.perf_counter()
    for index, cmd in enumerate(script.commands):
        if isinstance(cmd, Module):
            try:
                cfg = instantiate(cmd)
            except ValidationError as e:
                raise HarnessError(f"{path}:{cmd.line}: invalid module: {e}") from None
            exports = cmd.exports()
            continue
        invoke = cmd if isinstance(cmd, Invoke) else cmd.invoke
        if cfg is None:
            raise HarnessError(f"{path}:{invoke.line}: invoke before any module")
        if invoke.name not in exports:
            raise HarnessError(f"{path}:{invoke.line}: unknown export {invoke.name!r}")
        args = [value(t, b) for t, b in invoke.args]
        interp.executed.clear()
        message = ""
        try:
            result = interp.invoke(cfg, exports[invoke.name], args)
        except ArgumentMismatch as e:
            raise HarnessError(f"{path}:{invoke.line}: {e}") from None
        except (InterpreterBug, Exhausted) as e:
            result, message = None, f"{type(e).__name__}: {e}"
            cfg = instantiate(script.commands[_last_module(script, index)])
        if isinstance(cmd, Invoke):
            continue
        report.total += 1
        report.coverage.update(interp.executed)
        call = f'invoke "{invoke.name}"' + "".join(
            f" {_describe(t, b)}" for t, b in invoke.args)
        if isinstance(cmd, AssertTrap):
            ok = isinstance(result, Trap)
            expected = ["trap"]
        else:
            expected = [_describe(t, b) for t, b in cmd.expected]
            ok = result is not None and not isinstance(result, Trap) \
                and len(result.values) == len(cmd.expected) \
                and all(matches(e, a) for e, a in zip(cmd.expected, _runtime_values(result)))
        if ok:
            report.passed += 1
            report.trapped += isinstance(cmd, AssertTrap)
        else:
            report.failed += 1
            if result is None:
                actual = ["error"]
            elif isinstance(result, Trap):
                actual = ["trap"]
            else:
                actual = [_describe(t, b) for t, b in _runtime_values(result)]
            report.failures.append(Failure(index, cmd.line, call, expected, actual, message))
    report.seconds = time.perf_counter() - start
    return report


def _last_module(script, index: int) -> int:
    for i in range(index, -1, -1):
        if isinstance(script.commands[i], Module):
            return i
    raise HarnessError("no module")


def run_file(interp, path) -> FileReport:
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise HarnessError(f"{path}: {e.strerror or e}") from None
    try:
        script = parse_test_script(text)
    except TestParseError as e:
        raise HarnessError(f"{path}:{e.line}:{e.col}: {e.message}") from None
    return run_script(interp, script, str(path))


_WORKER = None


def _init_worker(spec_paths):
    global _WORKER
    from .pipeline import build
    _WORKER = build(spec_paths)[2]


def _run_in_worker(path):
    try:
        return run_file(_WORKER, path)
    except HarnessError as e:
        return e


def run_files(interp, paths, jobs: int = 1, spec_paths: Optional[list] = None) -> RunReport:
    """Run every script; with ``jobs > 1`` files run in separate processes."""
    start = time.perf_counter()
    report = RunReport()
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(spec_paths,)) as pool:
            results = list(pool.map(_run_in_worker, [str(p) for p in paths]))
        for r in results:
            if isinstance(r, HarnessError):
                raise r
            report.files.append(r)
    else:
        for p in paths:
            report.files.append(run_file(interp, p))
    report.seconds = time.perf_counter() - start
    return report
