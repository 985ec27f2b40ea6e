"""Acceptance criteria, one check each.

Every check prints ``CRITERION n: PASS|FAIL <detail>`` and then asserts.
Run ``python tests/test_acceptance.py`` for the summary alone.
"""

from __future__ import annotations

import pathlib
import subprocess
import sys
import tempfile
import time
import xml.etree.ElementTree as ET

import pytest

TESTS = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from differential import PROGRAMS, compare  # noqa: E402
from latex_toolchain import compile_latex  # noqa: E402
from spectec.al.animate import animate_rule_group, instruction_groups  # noqa: E402
from spectec.al.dump import dump_algorithm, skeleton  # noqa: E402
from spectec.corpus import spec_sources, suite_sources  # noqa: E402
from spectec.harness import run_files  # noqa: E402
from spectec.pipeline import build, check_sources, read_sources  # noqa: E402
from spectec.render import render_checked, render_prose  # noqa: E402

GOLDEN = TESTS / "golden"

# Pinned tolerances.
ANIMATE_SECONDS = 1.0
SUITE_MIN_ASSERTIONS = 200
SUITE_SECONDS = 5.0
PIPELINE_SECONDS = 1.0
DIFF_PROGRAMS = 10_000
DIFF_SECONDS = 60.0

BINOP_SKELETON = ["AssertI", "PopI", "AssertI", "PopI",
                  ("IfI", ["LetI", "PushI"], []), ("IfI", ["TrapI"], [])]
MUTANT = ("$binop(binop, nt, c_1, c_2) = c", "$binop(binop, nt, c_1) = c")

PROPERTY_GROUPS = {
    "binding soundness": ["test_binding_soundness"],
    "round-trip": ["test_parser_round_trip", "test_minwast_round_trip"],
    "re-check soundness": ["test_recheck_soundness", "test_recheck_soundness_on_corpus"],
    "stack discipline": ["test_stack_discipline", "test_eval_expr_purity"],
}


def binop_skeleton() -> tuple[bool, str]:
    il, _, _ = build()
    start = time.perf_counter()
    alg = animate_rule_group(instruction_groups(il)["BINOP"], il)
    seconds = time.perf_counter() - start
    shape = skeleton(alg.body)
    pops = [i.pattern.args[1].name for i in alg.body if type(i).__name__ == "PopI"]
    golden = (GOLDEN / "binop.al").read_text(encoding="utf-8")
    ok = (shape == BINOP_SKELETON and pops == ["c_2", "c_1"]
          and dump_algorithm(alg) == golden and seconds < ANIMATE_SECONDS)
    return ok, f"skeleton {'matches' if shape == BINOP_SKELETON else shape}, pops {pops}, " \
               f"golden {'equal' if dump_algorithm(alg) == golden else 'differs'}, " \
               f"{seconds * 1000:.1f} ms (< {ANIMATE_SECONDS:g} s)"


def arity_mutant() -> tuple[bool, str]:
    old, new = MUTANT
    sources = [(text.replace(old, new), f) for text, f in read_sources(spec_sources())]
    diags = check_sources(sources).diagnostics
    if len(diags) != 1:
        return False, f"{len(diags)} diagnostics: {[d.code for d in diags]}"
    (d,) = diags
    text = dict((f, t) for t, f in sources)[d.span.file]
    line = text.split("\n")[d.span.line_start - 1]
    covered = line[d.span.col_start - 1:d.span.col_end]
    ok = d.code == "E-ARITY" and covered == "$binop(binop, nt, c_1)"
    return ok, f"1 diagnostic {d.code} covering {covered!r}"


def conformance() -> tuple[bool, str]:
    start = time.perf_counter()
    il, algs, interp = build()
    pipeline = time.perf_counter() - start
    start = time.perf_counter()
    report = run_files(interp, [str(p) for p in suite_sources()])
    suite = time.perf_counter() - start
    ok = (report.total >= SUITE_MIN_ASSERTIONS and report.failed == 0
          and report.passed == report.total and suite < SUITE_SECONDS
          and pipeline < PIPELINE_SECONDS)
    return ok, f"{report.passed}/{report.total} assertions in {suite:.2f} s " \
               f"(< {SUITE_SECONDS:g} s), pipeline {pipeline:.2f} s (< {PIPELINE_SECONDS:g} s)"


def differential() -> tuple[bool, str]:
    assert PROGRAMS >= DIFF_PROGRAMS
    _, _, interp = build()
    start = time.perf_counter()
    out = compare(interp, range(DIFF_PROGRAMS))
    seconds = time.perf_counter() - start
    ok = out.programs == DIFF_PROGRAMS and not out.divergences and seconds < DIFF_SECONDS
    return ok, f"{out.programs} programs, {out.invokes} invokes ({out.traps} traps), " \
               f"{len(out.divergences)} divergences in {seconds:.1f} s (< {DIFF_SECONDS:g} s)"


def relational() -> tuple[bool, str]:
    from alstep import reduce_once
    from relational import Relations, freeze
    from test_relational import CASES, STATE
    il, _, interp = build()
    relations = Relations(il)
    bad = []
    for seq in CASES:
        found = {(s, o) for _, s, o in relations.derivations(STATE, seq)}
        state, out = reduce_once(interp, STATE, seq)
        if len(found) != 1 or (state, freeze(out)) not in found:
            bad.append(seq)
    instrs = {seq[-1][0] for seq in CASES}
    return not bad, f"{len(CASES) - len(bad)}/{len(CASES)} cases agree over {len(instrs)} " \
                    f"instruction forms"


def artifacts() -> tuple[bool, str]:
    from spectec.pipeline import check_paths
    checked = check_paths([str(p) for p in spec_sources()])
    compiled = compile_latex(render_checked(checked.el).text())
    _, algs, _ = build()
    binop = next(a for a in algs if a.instruction_name == "BINOP")
    prose_ok = render_prose(binop).rst() == (GOLDEN / "binop.rst").read_text(encoding="utf-8")
    prose = f"BINOP prose golden {'equal' if prose_ok else 'differs'}"
    if compiled is None:
        return False, f"no LaTeX engine found (PATH or `npm install --prefix tools`); {prose}"
    latex = f"LaTeX via {compiled.engine}: rc {compiled.returncode}, " \
            f"{len(compiled.errors)} errors, {compiled.pdf_bytes} byte PDF"
    return compiled.ok and prose_ok, f"{latex}; {prose}"


def properties() -> tuple[bool, str]:
    with tempfile.TemporaryDirectory() as d:
        xml = pathlib.Path(d) / "props.xml"
        subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                        f"--junitxml={xml}", str(TESTS / "test_properties.py")],
                       capture_output=True, text=True, cwd=TESTS.parent)
        if not xml.is_file():
            return False, "property run produced no report"
        results = {}
        for case in ET.parse(xml).iter("testcase"):
            failed = any(c.tag in ("failure", "error", "skipped") for c in case)
            results[case.get("name")] = not failed
    parts, ok = [], True
    for group, names in PROPERTY_GROUPS.items():
        passed = sum(results.get(n, False) for n in names)
        ok &= passed == len(names)
        parts.append(f"{group} {passed}/{len(names)}")
    return ok, ", ".join(parts)


CRITERIA = [
    (1, "BINOP skeleton", binop_skeleton),
    (2, "arity mutant", arity_mutant),
    (3, "conformance suite", conformance),
    (4, "differential oracle", differential),
    (5, "relational brute force", relational),
    (6, "artifacts", artifacts),
    (7, "property suites", properties),
]


def report(n: int, title: str, check) -> bool:
    ok, detail = check()
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {title}: {detail}", flush=True)
    return ok


@pytest.mark.parametrize("n,title,check", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(capsys, n, title, check):
    with capsys.disabled():
        print()
        ok = report(n, title, check)
    assert ok, f"criterion {n} failed"


if __name__ == "__main__":
    results = [report(n, title, check) for n, title, check in CRITERIA]
    sys.exit(0 if all(results) else 1)
