"""Command-line driver: ``spectec {check,latex,prose,animate,run,test}``.

Exit codes: 0 success, 1 check or test failures, 2 usage or infrastructure errors.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys
import time

from . import __version__
from .diagnostics import SpecError, emit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _spec_paths(args) -> list:
    paths = list(getattr(args, "paths", None) or [])
    if getattr(args, "corpus", False):
        from .corpus import spec_sources
        paths = [str(p) for p in spec_sources()] + paths
    if not paths:
        raise UsageError("no input files (pass .spectec paths or --corpus)")
    for p in paths:
        if not pathlib.Path(p).is_file():
            raise UsageError(f"no such file: {p}")
    return paths


def _checked(args):
    from .pipeline import check_paths
    checked = check_paths(_spec_paths(args))
    emit(checked.diagnostics, sys.stderr, as_json=getattr(args, "json", False))
    return checked


def _write(out, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        pathlib.Path(out).write_text(text, encoding="utf-8")


def cmd_check(args) -> int:
    checked = _checked(args)
    return EXIT_OK if checked.ok else EXIT_FAIL


def cmd_latex(args) -> int:
    from .render.latex import render_checked
    checked = _checked(args)
    if not checked.ok:
        print("latex: refusing to render sources with errors", file=sys.stderr)
        return EXIT_FAIL
    doc = render_checked(checked.el)
    emit(doc.warnings, sys.stderr)
    _write(args.output, doc.body() if args.body_only else doc.text())
    return EXIT_OK


def _animated(args):
    from .al.animate import AnimationError, CyclicDependency, animate
    checked = _checked(args)
    if not checked.ok:
        return checked, None
    try:
        return checked, animate(checked.il)
    except (AnimationError, CyclicDependency) as e:
        print(f"animate: {e}", file=sys.stderr)
        return checked, None


def _select(algorithms, names):
    if not names:
        return algorithms
    wanted = {n.upper() if not n.startswith("$") else n for n in names}
    chosen = [a for a in algorithms if a.instruction_name in wanted]
    missing = wanted - {a.instruction_name for a in chosen}
    if missing:
        raise UsageError(f"no algorithm for: {', '.join(sorted(missing))}")
    return chosen


def cmd_prose(args) -> int:
    from .render.prose import render_all
    _, algorithms = _animated(args)
    if algorithms is None:
        return EXIT_FAIL
    doc = render_all(_select(algorithms, args.only), rst=not args.plain)
    _write(args.output, doc.plain() if args.plain else doc.rst())
    return EXIT_OK


def cmd_animate(args) -> int:
    from .al.animate import binding_problems
    from .al.dump import dump_algorithms
    _, algorithms = _animated(args)
    if algorithms is None:
        return EXIT_FAIL
    chosen = _select(algorithms, args.only)
    problems = [p for a in chosen for p in binding_problems(a)]
    for p in problems:
        print(f"animate: {p}", file=sys.stderr)
    if args.dump_al:
        _write(args.output, dump_algorithms(chosen))
    else:
        _write(args.output, "".join(f"{a.header}\n" for a in chosen))
    return EXIT_FAIL if problems else EXIT_OK


def _parse_arg(text: str):
    from .corpus.minwast import parse_const
    nt, sep, lit = text.partition(":")
    if not sep or nt not in ("i32", "i64", "f32", "f64"):
        raise UsageError(f"argument {text!r} must look like i32:5 or f64:-0x1p3")
    try:
        return nt, parse_const(nt, lit)
    except ValueError as e:
        raise UsageError(f"argument {text!r}: {e}") from None


def cmd_run(args) -> int:
    from .corpus.minwast import Module, TestParseError, format_const, parse_test_script
    from .pipeline import build
    from .runtime.interp import ArgumentMismatch, Exhausted, InterpreterBug, Trap
    from .runtime.module import ValidationError, instantiate, value

    spec = _spec_paths(args) if args.paths else None
    path = pathlib.Path(args.module)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    try:
        script = parse_test_script(path.read_text(encoding="utf-8"))
    except TestParseError as e:
        raise UsageError(f"{path}:{e.line}:{e.col}: {e.message}") from None
    modules = [c for c in script.commands if isinstance(c, Module)]
    if not modules:
        raise UsageError(f"{path}: no module")
    mod = modules[-1]
    exports = mod.exports()
    if args.function not in exports:
        raise UsageError(f"{path}: no export named {args.function!r}")
    call_args = [_parse_arg(a) for a in args.args]
    _, _, interp = build(spec)
    try:
        cfg = instantiate(mod)
        result = interp.invoke(cfg, exports[args.function], [value(t, b) for t, b in call_args])
    except (ValidationError, ArgumentMismatch) as e:
        raise UsageError(str(e)) from None
    except (InterpreterBug, Exhausted) as e:
        print(f"run: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    if isinstance(result, Trap):
        print("trap")
    else:
        print(" ".join(f"{v[1][0].lower()}:{format_const(v[1][0].lower(), v[2])}"
                       for v in result.values))
    return EXIT_OK


def _test_paths(args) -> list:
    from .corpus import suite_sources
    out: list = []
    for t in args.tests:
        p = pathlib.Path(t)
        if p.is_dir():
            out.extend(sorted(p.glob("*.minwast")))
        elif p.is_file():
            out.append(p)
        else:
            raise UsageError(f"no such file: {t}")
    if not out and args.corpus:
        out = suite_sources()
    if not out:
        raise UsageError("no test scripts (pass .minwast paths or --corpus)")
    return out


def cmd_test(args) -> int:
    from .harness import HarnessError, run_files
    from .pipeline import build

    spec = list(args.spec or [])
    for p in spec:
        if not pathlib.Path(p).is_file():
            raise UsageError(f"no such file: {p}")
    if not spec and not args.corpus:
        raise UsageError("no sources (pass --spec FILE or --corpus)")
    tests = _test_paths(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    start = time.perf_counter()
    try:
        _, _, interp = build(spec or None)
    except SpecError as e:
        emit(e.diagnostics, sys.stderr)
        return EXIT_USAGE
    try:
        report = run_files(interp, tests, jobs=args.jobs, spec_paths=spec or None)
    except HarnessError as e:
        print(f"test: {e}", file=sys.stderr)
        return EXIT_USAGE
    report.seconds = time.perf_counter() - start
    if args.json:
        sys.stdout.write(json.dumps(report.to_json(timing=not args.no_timing),
                                    indent=2, sort_keys=True) + "\n")
    else:
        for f in report.files:
            for failure in f.failures:
                print(failure.format(f.path))
        print(report.summary())
    return EXIT_OK if report.failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spectec", description="Semantics pipeline for a "
                                 "WebAssembly subset: check, render, animate, run and test.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def spec_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("paths", nargs="*", metavar="FILE", help=".spectec source files")
        p.add_argument("--corpus", action="store_true", help="prepend the bundled corpus")
        p.add_argument("--json", action="store_true", help="diagnostics as JSON lines")
        return p

    p = spec_cmd("check", "parse and elaborate; report diagnostics")
    p.set_defaults(func=cmd_check)

    p = spec_cmd("latex", "render LaTeX rules")
    p.add_argument("-o", "--output", help="output .tex file (default: stdout)")
    p.add_argument("--body-only", action="store_true", help="omit the document wrapper")
    p.set_defaults(func=cmd_latex)

    p = spec_cmd("prose", "render prose pseudocode")
    p.add_argument("-o", "--output", help="output .rst file (default: stdout)")
    p.add_argument("--plain", action="store_true", help="plain text instead of reStructuredText")
    p.add_argument("--only", action="append", metavar="NAME", help="restrict to one algorithm")
    p.set_defaults(func=cmd_prose)

    p = spec_cmd("animate", "animate reduction rules into AL")
    p.add_argument("--dump-al", action="store_true", help="print full AL algorithms")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--only", action="append", metavar="NAME", help="restrict to one algorithm")
    p.set_defaults(func=cmd_animate)

    p = sub.add_parser("run", help="invoke one exported function")
    p.add_argument("module", help=".minwast file; its last module is instantiated")
    p.add_argument("function", help="export name")
    p.add_argument("args", nargs="*", metavar="ARG", help="arguments such as i32:5 or f32:nan")
    p.add_argument("--spec", dest="paths", action="append", metavar="FILE",
                   help=".spectec source files (default: bundled corpus)")
    p.set_defaults(func=cmd_run, corpus=False)

    p = sub.add_parser("test", help="run conformance scripts")
    p.add_argument("tests", nargs="*", metavar="SCRIPT", help=".minwast files or directories")
    p.add_argument("--spec", action="append", metavar="FILE", help=".spectec source files")
    p.add_argument("--corpus", action="store_true",
                   help="use the bundled corpus (and suite, if no scripts are given)")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--no-timing", action="store_true", help="omit wall times from JSON")
    p.add_argument("--jobs", "-j", type=int, default=1, help="parallel processes, one per file")
    p.set_defaults(func=cmd_test)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"spectec {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (OSError, UnicodeDecodeError) as e:
        print(f"spectec {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
