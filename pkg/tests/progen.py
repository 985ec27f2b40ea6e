"""Seeded, type-directed random programs over the covered instruction set.

Programs always validate and always terminate: loops are driven by reserved
counter locals that nothing else writes, branches never target a loop label
from outside the counter pattern, and calls only go to lower-indexed functions.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from spectec.corpus.minwast import NUMERIC, Func, Global, Instr, Invoke, Module

TYPES = ("i32", "i64", "f32", "f64")

EDGE = {
    "i32": [0, 1, 2, 0xFFFFFFFF, 0x80000000, 0x7FFFFFFF, 31, 32, 33, 0xFFFFFFFE],
    "i64": [0, 1, 2, 0xFFFFFFFFFFFFFFFF, 1 << 63, (1 << 63) - 1, 63, 64, 65,
            0xFFFFFFFF, 0x100000000],
    "f32": [0x00000000, 0x80000000, 0x3F800000, 0xBF800000, 0x7F800000, 0xFF800000,
            0x7FC00000, 0xFFC00000, 0x7FA00001, 0x00000001, 0x7F7FFFFF, 0x40490FDB,
            0x3EAAAAAB],
    "f64": [0, 1 << 63, 0x3FF0000000000000, 0xBFF0000000000000, 0x7FF0000000000000,
            0xFFF0000000000000, 0x7FF8000000000000, 0xFFF8000000000000,
            0x7FF4000000000001, 1, 0x7FEFFFFFFFFFFFFF, 0x400921FB54442D18,
            0x3FD5555555555555],
}
WIDTH = {"i32": 32, "i64": 64, "f32": 32, "f64": 64}


@dataclass
class _Label:
    kind: str  # "block" | "loop" | "if" | "func"
    types: tuple


@dataclass
class _Fn:
    index: int
    params: list
    results: list
    locals: list = field(default_factory=list)
    counters: set = field(default_factory=set)
    labels: list = field(default_factory=list)

    def types(self) -> list:
        return self.params + self.locals

    def writable(self, t: str) -> list:
        return [i for i, lt in enumerate(self.types()) if lt == t and i not in self.counters]


class ProgramGenerator:
    def __init__(self, seed: int, max_depth: int = 3, max_funcs: int = 4):
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.max_funcs = max_funcs
        self.funcs: list = []
        self.globals: list = []
        self.budget = 0

    # -- values -------------------------------------------------------------

    def value(self, t: str) -> int:
        r = self.rng.random()
        if r < 0.55:
            return self.rng.choice(EDGE[t])
        if r < 0.8 and t[0] == "i":
            return self.rng.randrange(-16, 17) % (1 << WIDTH[t])
        if t[0] == "f" and r < 0.8:
            x = self.rng.choice([0.5, 1.5, -2.25, 3.0, 1e10, -7.0, 0.1, 100.0])
            fmt, ifmt = ("<f", "<I") if t == "f32" else ("<d", "<Q")
            return struct.unpack(ifmt, struct.pack(fmt, x))[0]
        return self.rng.getrandbits(WIDTH[t])

    # -- modules -------------------------------------------------------------

    def module(self) -> Module:
        rng = self.rng
        self.globals = [Global(None, t, rng.random() < 0.7, self.value(t))
                        for t in rng.choices(TYPES, k=rng.randrange(0, 4))]
        self.funcs = []
        for i in range(rng.randrange(1, self.max_funcs + 1)):
            params = rng.choices(TYPES, k=rng.randrange(0, 4))
            results = rng.choices(TYPES, k=rng.choices([0, 1, 2], [2, 6, 1])[0])
            fn = _Fn(i, params, results,
                     locals=rng.choices(TYPES, k=rng.randrange(0, 3)))
            fn.labels = [_Label("func", tuple(results))]
            self.budget = 60
            body = self.stmts(fn, self.max_depth, rng.randrange(0, 3))
            for t in results:
                body += self.expr(fn, t, self.max_depth)
            self.funcs.append(Func(None, params, results, fn.locals, body, [f"f{i}"]))
        return Module(self.funcs, self.globals)

    def invokes(self, module: Module) -> list:
        calls = []
        for i in self.rng.sample(range(len(module.funcs)), len(module.funcs)):
            f = module.funcs[i]
            calls.append(Invoke(f"f{i}", [(t, self.value(t)) for t in f.params]))
        return calls

    # -- instructions -------------------------------------------------------

    def _spend(self, depth: int) -> int:
        self.budget -= 1
        return depth if self.budget > 0 else 0

    def expr(self, fn: _Fn, t: str, depth: int) -> list:
        """Instructions that push exactly one value of type ``t``."""
        depth = self._spend(depth)
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            return self.leaf(fn, t)
        forms = ["unop", "binop", "binop", "select", "block", "if", "tee", "call"]
        if t == "i32":
            forms += ["relop", "relop", "testop"]
        form = rng.choice(forms)
        d = depth - 1
        if form == "unop":
            op = rng.choice(NUMERIC["int_unop" if t[0] == "i" else "float_unop"])
            return self.expr(fn, t, d) + [Instr(f"{t}.{op}")]
        if form == "binop":
            op = rng.choice(NUMERIC["int_binop" if t[0] == "i" else "float_binop"])
            return self.expr(fn, t, d) + self.expr(fn, t, d) + [Instr(f"{t}.{op}")]
        if form == "relop":
            u = rng.choice(TYPES)
            op = rng.choice(NUMERIC["int_relop" if u[0] == "i" else "float_relop"])
            return self.expr(fn, u, d) + self.expr(fn, u, d) + [Instr(f"{u}.{op}")]
        if form == "testop":
            u = rng.choice(("i32", "i64"))
            return self.expr(fn, u, d) + [Instr(f"{u}.eqz")]
        if form == "select":
            return self.expr(fn, t, d) + self.expr(fn, t, d) + self.expr(fn, "i32", d) \
                + [Instr("select")]
        if form == "block":
            kind = rng.choice(("block", "block", "loop"))
            fn.labels.append(_Label(kind, (t,) if kind == "block" else ()))
            body = self.stmts(fn, d, rng.randrange(0, 3)) + self.expr(fn, t, d)
            fn.labels.pop()
            return [Instr(kind, (), tuple(body), (), (t,))]
        if form == "if":
            cond = self.expr(fn, "i32", d)
            fn.labels.append(_Label("if", (t,)))
            then = self.stmts(fn, d, rng.randrange(0, 2)) + self.expr(fn, t, d)
            if rng.random() < 0.1:
                then = [Instr("unreachable")]
            other = self.stmts(fn, d, rng.randrange(0, 2)) + self.expr(fn, t, d)
            fn.labels.pop()
            return cond + [Instr("if", (), tuple(then), tuple(other), (t,))]
        if form == "tee":
            slots = fn.writable(t)
            if slots:
                return self.expr(fn, t, d) + [Instr("local.tee", (rng.choice(slots),))]
        if form == "call":
            callees = [g for g in range(fn.index) if self.funcs[g].results == [t]]
            if callees:
                return self.call(fn, rng.choice(callees), d)
        return self.leaf(fn, t)

    def leaf(self, fn: _Fn, t: str) -> list:
        rng = self.rng
        choices = [("const", None)] * 2
        choices += [("local.get", i) for i, lt in enumerate(fn.types()) if lt == t]
        choices += [("global.get", i) for i, g in enumerate(self.globals) if g.type == t]
        op, idx = rng.choice(choices)
        if op == "const":
            return [Instr(f"{t}.const", (self.value(t),))]
        return [Instr(op, (idx,))]

    def call(self, fn: _Fn, callee: int, depth: int) -> list:
        out: list = []
        for pt in self.funcs[callee].params:
            out += self.expr(fn, pt, depth)
        return out + [Instr("call", (callee,))]

    def stmts(self, fn: _Fn, depth: int, count: int) -> list:
        out: list = []
        for _ in range(count):
            out += self.stmt(fn, depth)
        return out

    def _branch_targets(self, fn: _Fn) -> list:
        n = len(fn.labels)
        return [(n - 1 - k, lab) for k, lab in enumerate(fn.labels) if lab.kind != "loop"]

    def stmt(self, fn: _Fn, depth: int) -> list:
        """Instructions with no net effect on the operand stack."""
        depth = self._spend(depth)
        rng = self.rng
        forms = ["drop", "set", "set", "global", "nop"]
        if depth > 0:
            forms += ["call", "if", "block", "loop", "br_if", "br_if", "br", "return", "trap"]
        form = rng.choice(forms)
        d = depth - 1
        if form == "drop":
            return self.expr(fn, rng.choice(TYPES), d) + [Instr("drop")]
        if form == "set":
            t = rng.choice(TYPES)
            slots = fn.writable(t)
            if slots:
                return self.expr(fn, t, d) + [Instr("local.set", (rng.choice(slots),))]
        if form == "global":
            slots = [i for i, g in enumerate(self.globals) if g.mutable]
            if slots:
                g = rng.choice(slots)
                return self.expr(fn, self.globals[g].type, d) + [Instr("global.set", (g,))]
        if form == "call" and fn.index > 0:
            callee = rng.randrange(fn.index)
            return self.call(fn, callee, d) + [Instr("drop")] * len(self.funcs[callee].results)
        if form == "if":
            cond = self.expr(fn, "i32", d)
            fn.labels.append(_Label("if", ()))
            then = self.stmts(fn, d, rng.randrange(1, 3))
            other = self.stmts(fn, d, rng.randrange(0, 2))
            fn.labels.pop()
            return cond + [Instr("if", (), tuple(then), tuple(other), ())]
        if form == "block":
            fn.labels.append(_Label("block", ()))
            body = self.stmts(fn, d, rng.randrange(1, 4))
            fn.labels.pop()
            return [Instr("block", (), tuple(body), (), ())]
        if form == "loop":
            k = len(fn.types())
            fn.locals.append("i32")
            fn.counters.add(k)
            fn.labels.append(_Label("loop", ()))
            body = self.stmts(fn, d, rng.randrange(1, 3)) + [
                Instr("local.get", (k,)), Instr("i32.const", (1,)), Instr("i32.sub"),
                Instr("local.tee", (k,)), Instr("br_if", (0,))]
            fn.labels.pop()
            return [Instr("i32.const", (rng.randrange(1, 4),)), Instr("local.set", (k,)),
                    Instr("loop", (), tuple(body), (), ())]
        if form == "br_if":
            depth_, lab = rng.choice(self._branch_targets(fn))
            vals: list = []
            for t in lab.types:
                vals += self.expr(fn, t, d)
            return vals + self.expr(fn, "i32", d) + [Instr("br_if", (depth_,))] \
                + [Instr("drop")] * len(lab.types)
        if form == "br":
            cond = self.expr(fn, "i32", d)
            depth_, lab = rng.choice(self._branch_targets(fn))
            vals = []
            for t in lab.types:
                vals += self.expr(fn, t, d)
            then = vals + [Instr("br", (depth_ + 1,))]
            return cond + [Instr("if", (), tuple(then), (), ())]
        if form == "return":
            cond = self.expr(fn, "i32", d)
            then: list = []
            for t in fn.results:
                then += self.expr(fn, t, d)
            return cond + [Instr("if", (), tuple(then + [Instr("return")]), (), ())]
        if form == "trap":
            cond = self.expr(fn, "i32", d)
            return cond + [Instr("if", (), (Instr("unreachable"),), (), ())]
        return [Instr("nop")]


def program(seed: int) -> tuple:
    """``(module, invokes)`` for one seed."""
    gen = ProgramGenerator(seed)
    mod = gen.module()
    return mod, gen.invokes(mod)
