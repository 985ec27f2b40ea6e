"""Regenerate the conformance suite under src/spectec/corpus/suite/.

Expected results are computed by the oracle interpreter in tests/oracle.py and
written out as literals, so the suite files are frozen data afterwards.

    python3 tools/make_suite.py
"""

from __future__ import annotations

import argparse
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402
from spectec.corpus.minwast import format_const, parse_test_script  # noqa: E402
from spectec.runtime.module import validate  # noqa: E402

SUITE = ROOT / "src" / "spectec" / "corpus" / "suite"

I32 = ["0", "1", "2", "-1", "0x7fffffff", "0x80000000", "0x12345678", "31", "32", "-7"]
I64 = ["0", "1", "2", "-1", "0x7fffffffffffffff", "0x8000000000000000", "0x123456789abcdef0",
       "63", "64", "-7"]
F32 = ["0", "-0", "1", "-1.5", "inf", "-inf", "nan", "0x1p-149", "0x1.fffffep127", "3.25"]
F64 = ["0", "-0", "1", "-1.5", "inf", "-inf", "nan", "0x0.0000000000001p-1022",
       "0x1.fffffffffffffp1023", "3.25"]
VALUES = {"i32": I32, "i64": I64, "f32": F32, "f64": F64}

INT_UNOPS = ["clz", "ctz", "popcnt"]
FLOAT_UNOPS = ["neg", "abs", "sqrt"]
INT_BINOPS = ["add", "sub", "mul", "div_s", "div_u", "rem_s", "rem_u", "and", "or", "xor",
              "shl", "shr_s", "shr_u", "rotl", "rotr"]
FLOAT_BINOPS = ["add", "sub", "mul", "div", "min", "max"]
INT_RELOPS = ["eq", "ne", "lt_s", "lt_u", "gt_s", "gt_u", "le_s", "le_u", "ge_s", "ge_u"]
FLOAT_RELOPS = ["eq", "ne", "lt", "gt", "le", "ge"]

# operand pairs per binary op: a deterministic selection covering edge cases
PAIRS = [(0, 0), (1, 2), (3, 1), (5, 4), (4, 5), (3, 3), (2, 7), (9, 8), (6, 3), (5, 9)]


def numeric_module(nt: str) -> tuple:
    ints = nt[0] == "i"
    unops = INT_UNOPS + (["eqz"] if ints else []) if ints else FLOAT_UNOPS
    binops = INT_BINOPS if ints else FLOAT_BINOPS
    relops = INT_RELOPS if ints else FLOAT_RELOPS
    funcs, calls = [], []
    for op in unops:
        res = "i32" if op == "eqz" else nt
        funcs.append(f'  (func (export "{op}") (param {nt}) (result {res}) '
                     f'(local.get 0) ({nt}.{op}))')
        for v in VALUES[nt][:6] + VALUES[nt][7:8]:
            calls.append((op, [v]))
    for op in binops + relops:
        res = "i32" if op in relops else nt
        funcs.append(f'  (func (export "{op}") (param {nt} {nt}) (result {res}) '
                     f'(local.get 0) (local.get 1) ({nt}.{op}))')
        for a, b in PAIRS[:4] if op in relops else PAIRS[:6]:
            calls.append((op, [VALUES[nt][a], VALUES[nt][b]]))
    funcs.append(f'  (func (export "const") (result {nt}) ({nt}.const {VALUES[nt][4]}))')
    calls.append(("const", []))
    return "(module\n" + "\n".join(funcs) + ")\n", [(op, [(nt, v) for v in args]) for op, args in calls]


PARAMETRIC = """(module
  (func (export "nop") (param i32) (result i32) nop (local.get 0) nop)
  (func (export "nop-only") nop)
  (func (export "drop") (param i32 i64) (result i32) (local.get 0) (local.get 1) drop)
  (func (export "drop-f") (param f64) (result f64) (f64.const 1) (local.get 0) drop)
  (func (export "select-i32") (param i32 i32 i32) (result i32)
    (select (local.get 0) (local.get 1) (local.get 2)))
  (func (export "select-f32") (param f32 f32 i32) (result f32)
    (select (local.get 0) (local.get 1) (local.get 2)))
  (func (export "select-i64") (param i64 i64 i32) (result i64)
    (select (local.get 0) (local.get 1) (local.get 2))))
"""
PARAMETRIC_CALLS = [
    ("nop", [("i32", "7")]), ("nop", [("i32", "-1")]), ("nop-only", []),
    ("drop", [("i32", "3"), ("i64", "4")]), ("drop", [("i32", "0"), ("i64", "-1")]),
    ("drop-f", [("f64", "nan")]), ("drop-f", [("f64", "2")]),
    ("select-i32", [("i32", "1"), ("i32", "2"), ("i32", "1")]),
    ("select-i32", [("i32", "1"), ("i32", "2"), ("i32", "0")]),
    ("select-i32", [("i32", "1"), ("i32", "2"), ("i32", "0x80000000")]),
    ("select-f32", [("f32", "nan:0x200000"), ("f32", "-0"), ("i32", "1")]),
    ("select-f32", [("f32", "nan:0x200000"), ("f32", "-0"), ("i32", "0")]),
    ("select-i64", [("i64", "-1"), ("i64", "5"), ("i32", "-1")]),
]

VARIABLES = """(module
  (global $counter (mut i32) (i32.const 0))
  (global $big (mut i64) (i64.const 0x7fffffffffffffff))
  (global $pi f64 (f64.const 3.141592653589793))
  (func (export "get-param") (param i32 i32) (result i32) (local.get 1))
  (func (export "zero-local") (result i64) (local i64) (local.get 0))
  (func (export "zero-local-f") (result f32) (local f32) (local.get 0))
  (func (export "set-local") (param i32) (result i32) (local $x i32)
    (local.set $x (i32.mul (local.get 0) (i32.const 3))) (local.get $x))
  (func (export "set-param") (param $p f64) (result f64)
    (local.set $p (f64.neg (local.get $p))) (local.get $p))
  (func (export "tee") (param i32) (result i32) (local $x i32)
    (i32.add (local.tee $x (local.get 0)) (local.get $x)))
  (func (export "tee-drop") (param i64) (result i64) (local i64)
    (drop (local.tee 1 (i64.const -9))) (local.get 1))
  (func (export "tee-nan") (param f32) (result f32) (local f32)
    (local.tee 1 (local.get 0)))
  (func (export "bump") (result i32)
    (global.set $counter (i32.add (global.get $counter) (i32.const 1))) (global.get $counter))
  (func (export "counter") (result i32) (global.get $counter))
  (func (export "overflow-big") (result i64)
    (global.set $big (i64.add (global.get $big) (i64.const 1))) (global.get $big))
  (func (export "pi") (result f64) (global.get $pi)))
"""
VARIABLES_CALLS = [
    ("get-param", [("i32", "1"), ("i32", "2")]), ("get-param", [("i32", "0"), ("i32", "-1")]),
    ("zero-local", []), ("zero-local-f", []),
    ("set-local", [("i32", "5")]), ("set-local", [("i32", "0x80000000")]),
    ("set-local", [("i32", "-1")]),
    ("set-param", [("f64", "0")]), ("set-param", [("f64", "-inf")]),
    ("tee", [("i32", "21")]), ("tee", [("i32", "0x7fffffff")]), ("tee-drop", [("i64", "1")]),
    ("tee-nan", [("f32", "nan:0x1")]),
    ("counter", []), ("bump", []), ("bump", []), ("counter", []),
    ("overflow-big", []), ("overflow-big", []), ("pi", []),
]

CONTROL = """(module
  (global $log (mut i32) (i32.const 0))
  (func $fac (export "fac") (param i64) (result i64)
    (if (result i64) (i64.eqz (local.get 0))
      (then (i64.const 1))
      (else (i64.mul (local.get 0) (call $fac (i64.sub (local.get 0) (i64.const 1)))))))
  (func (export "block-value") (result i32) (block (result i32) (i32.const 7)))
  (func (export "block-empty") (block nop))
  (func (export "block-br") (param i32) (result i32)
    (block (result i32) (i32.const 1) (br 0 (i32.const 2)) (i32.const 3)))
  (func (export "block-nested") (param i32) (result i32)
    (block $outer (result i32)
      (block $inner
        (br_if $inner (local.get 0))
        (br $outer (i32.const 10)))
      (i32.const 20)))
  (func (export "loop-sum") (param $n i32) (result i32) (local $acc i32)
    (block $done
      (loop $top
        (br_if $done (i32.eqz (local.get $n)))
        (local.set $acc (i32.add (local.get $acc) (local.get $n)))
        (local.set $n (i32.sub (local.get $n) (i32.const 1)))
        (br $top)))
    (local.get $acc))
  (func (export "loop-fallthrough") (result i32) (loop (result i32) (i32.const 5)))
  (func (export "loop-count") (param i64) (result i64) (local $i i64)
    (loop $l
      (local.set $i (i64.add (local.get $i) (i64.const 1)))
      (br_if $l (i64.lt_u (local.get $i) (local.get 0))))
    (local.get $i))
  (func (export "if-then") (param i32) (result i32)
    (if (result i32) (local.get 0) (then (i32.const 1)) (else (i32.const 2))))
  (func (export "if-no-else") (param i32) (result i32)
    (if (local.get 0) (then (global.set $log (i32.const 9))))
    (global.get $log))
  (func (export "if-br") (param i32) (result f32)
    (block (result f32)
      (if (local.get 0) (then (br 1 (f32.const 0.5))))
      (f32.const -0.5)))
  (func (export "br-if-value") (param i32) (result i32)
    (block (result i32)
      (drop (br_if 0 (i32.const 42) (local.get 0)))
      (i32.const 7)))
  (func (export "br-if-nested") (param i32) (result i32)
    (block $a (result i32)
      (block $b
        (block $c
          (drop (br_if $a (i32.const 1) (i32.eq (local.get 0) (i32.const 1))))
          (br_if $b (i32.eq (local.get 0) (i32.const 2)))
          (br_if $c (i32.eq (local.get 0) (i32.const 3))))
        (return (i32.const 3)))
      (i32.const 2)))
  (func (export "br-out-of-func") (result i64) (i64.const 8) (br 0) (i64.const 9))
  (func (export "return-early") (param i32) (result i32)
    (if (local.get 0) (then (return (i32.const 100))))
    (i32.const 200))
  (func (export "return-nested") (result f64)
    (block (loop (block (return (f64.const 1.25))))) (f64.const 0))
  (func (export "return-extra") (result i32)
    (i32.const 1) (i32.const 2) (return))
  (func $unr (export "unreachable") (result i32) unreachable)
  (func (export "unreachable-after") (param i32) (result i32)
    (if (local.get 0) (then unreachable)) (i32.const 4))
  (func (export "unreachable-in-call") (result i32) (call $unr))
  (func $swap (export "swap") (param i32 f32) (result f32 i32) (local.get 1) (local.get 0))
  (func (export "call-swap") (result f32) (call $swap (i32.const 3) (f32.const 2)) (drop))
  (func (export "call-div") (param i32 i32) (result i32)
    (call $div (local.get 0) (local.get 1)))
  (func $div (param i32 i32) (result i32) (i32.div_s (local.get 0) (local.get 1)))
  (func (export "call-global") (result i32) (call $set-log) (global.get $log))
  (func $set-log (global.set $log (i32.const -5))))
"""
CONTROL_CALLS = [
    ("fac", [("i64", "0")]), ("fac", [("i64", "5")]), ("fac", [("i64", "25")]),
    ("block-value", []), ("block-empty", []),
    ("block-br", [("i32", "0")]), ("block-nested", [("i32", "0")]), ("block-nested", [("i32", "1")]),
    ("loop-sum", [("i32", "0")]), ("loop-sum", [("i32", "10")]), ("loop-sum", [("i32", "1000")]),
    ("loop-fallthrough", []), ("loop-count", [("i64", "0")]), ("loop-count", [("i64", "17")]),
    ("if-then", [("i32", "0")]), ("if-then", [("i32", "1")]), ("if-then", [("i32", "-1")]),
    ("if-no-else", [("i32", "0")]), ("if-no-else", [("i32", "1")]),
    ("if-br", [("i32", "0")]), ("if-br", [("i32", "2")]),
    ("br-if-value", [("i32", "0")]), ("br-if-value", [("i32", "1")]),
    ("br-if-nested", [("i32", "0")]), ("br-if-nested", [("i32", "1")]),
    ("br-if-nested", [("i32", "2")]), ("br-if-nested", [("i32", "3")]),
    ("br-out-of-func", []),
    ("return-early", [("i32", "0")]), ("return-early", [("i32", "1")]),
    ("return-nested", []), ("return-extra", []),
    ("unreachable", []), ("unreachable-after", [("i32", "0")]), ("unreachable-after", [("i32", "1")]),
    ("unreachable-in-call", []),
    ("swap", [("i32", "1"), ("f32", "-0")]), ("call-swap", []),
    ("call-div", [("i32", "7"), ("i32", "-2")]), ("call-div", [("i32", "1"), ("i32", "0")]),
    ("call-div", [("i32", "0x80000000"), ("i32", "-1")]),
    ("call-global", []),
]


def render(module: str, calls, header: str) -> str:
    mod = parse_test_script(module).commands[0]
    validate(mod)
    inst = oracle.Instance(mod)
    lines = [f";; {header}", ";; Expected values computed by tests/oracle.py.", "", module.rstrip(), ""]
    for name, args in calls:
        parsed = parse_test_script(_invoke(name, args)).commands[0]
        result = inst.invoke(name, parsed.args)
        inv = _invoke(name, [(t, format_const(t, b)) for t, b in parsed.args])
        if result[0] == "trap":
            lines.append(f"(assert_trap {inv})")
        else:
            exp = " ".join(f"({t}.const {_expected(t, b)})" for t, b in result[1])
            lines.append(f"(assert_return {inv}{' ' if exp else ''}{exp})")
    return "\n".join(lines) + "\n"


def _expected(nt, bits):
    if nt == "f32" and bits == 0x7FC00000 or nt == "f64" and bits == 0x7FF8000000000000:
        return "nan:canonical"
    return format_const(nt, bits)


def _invoke(name, args):
    return " ".join([f'(invoke "{name}"'] + [f"({t}.const {v})" for t, v in args]) + ")"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=pathlib.Path, default=SUITE)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    files = {}
    for nt in ("i32", "i64", "f32", "f64"):
        mod, calls = numeric_module(nt)
        files[f"numeric-{nt}.minwast"] = render(mod, calls, f"{nt} numeric instructions")
    files["parametric.minwast"] = render(PARAMETRIC, PARAMETRIC_CALLS, "nop, drop and select")
    files["variables.minwast"] = render(VARIABLES, VARIABLES_CALLS, "locals and globals")
    files["control.minwast"] = render(CONTROL, CONTROL_CALLS, "structured control and calls")
    total = 0
    for name, text in files.items():
        (args.out / name).write_text(text)
        total += text.count("(assert_")
    print(f"wrote {len(files)} files, {total} assertions")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
