"""Validation of minwast modules and their translation to runtime terms."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.minwast import Func, Instr, Module, numeric_class
from .interp import Config, Store


class ValidationError(Exception):
    pass


_UNKNOWN = None  # operand type in unreachable code


@dataclass
class _Ctrl:
    label_types: tuple
    end_types: tuple
    height: int
    unreachable: bool = False


class _Validator:
    """Operand-stack type checking of one function body."""

    def __init__(self, mod: Module, func: Func):
        self.mod = mod
        self.func = func
        self.locals = list(func.params) + list(func.locals)
        self.vals: list = []
        self.ctrls: list = []

    def fail(self, msg):
        name = self.func.name or (self.func.exports[0] if self.func.exports else "?")
        raise ValidationError(f"function {name}: {msg}")

    def push(self, t):
        self.vals.append(t)

    def pop(self, expect=_UNKNOWN):
        top = self.ctrls[-1]
        if len(self.vals) == top.height:
            if top.unreachable:
                return expect
            self.fail("operand stack underflow")
        actual = self.vals.pop()
        if actual is not _UNKNOWN and expect is not _UNKNOWN and actual != expect:
            self.fail(f"type mismatch: expected {expect}, got {actual}")
        return actual if actual is not _UNKNOWN else expect

    def pop_all(self, types):
        for t in reversed(types):
            self.pop(t)

    def unreachable(self):
        top = self.ctrls[-1]
        del self.vals[top.height:]
        top.unreachable = True

    def run(self):
        self.ctrls.append(_Ctrl(tuple(self.func.results), tuple(self.func.results), 0))
        self.seq(self.func.body)
        self.end()

    def end(self):
        top = self.ctrls[-1]
        self.pop_all(top.end_types)
        if len(self.vals) != top.height:
            self.fail("values left on the stack at the end of a block")
        self.ctrls.pop()
        return top

    def seq(self, body):
        for ins in body:
            self.instr(ins)

    def label(self, depth):
        if depth >= len(self.ctrls):
            self.fail(f"unknown label {depth}")
        return self.ctrls[-1 - depth].label_types

    def block(self, label_types, result, body):
        self.ctrls.append(_Ctrl(tuple(label_types), tuple(result), len(self.vals)))
        self.seq(body)
        self.end()

    def instr(self, ins: Instr):
        op = ins.op
        cls = numeric_class(op)
        if cls is not None:
            kind, nt, _ = cls
            if kind == "const":
                self.push(nt)
            elif kind == "unop":
                self.pop(nt)
                self.push(nt)
            elif kind == "binop":
                self.pop(nt)
                self.pop(nt)
                self.push(nt)
            elif kind == "testop":
                self.pop(nt)
                self.push("i32")
            else:
                self.pop(nt)
                self.pop(nt)
                self.push("i32")
            return
        if op == "nop":
            return
        if op == "unreachable":
            self.unreachable()
        elif op == "drop":
            self.pop()
        elif op == "select":
            self.pop("i32")
            t1 = self.pop()
            t2 = self.pop(t1)
            self.push(t2)
        elif op in ("local.get", "local.set", "local.tee"):
            x = ins.args[0]
            if x >= len(self.locals):
                self.fail(f"unknown local {x}")
            t = self.locals[x]
            if op == "local.get":
                self.push(t)
            elif op == "local.set":
                self.pop(t)
            else:
                self.pop(t)
                self.push(t)
        elif op in ("global.get", "global.set"):
            x = ins.args[0]
            if x >= len(self.mod.globals):
                self.fail(f"unknown global {x}")
            g = self.mod.globals[x]
            if op == "global.get":
                self.push(g.type)
            else:
                if not g.mutable:
                    self.fail(f"global {x} is immutable")
                self.pop(g.type)
        elif op == "call":
            x = ins.args[0]
            if x >= len(self.mod.funcs):
                self.fail(f"unknown function {x}")
            callee = self.mod.funcs[x]
            self.pop_all(callee.params)
            for t in callee.results:
                self.push(t)
        elif op == "block":
            self.block(ins.result, ins.result, ins.body)
            self.vals.extend(ins.result)
        elif op == "loop":
            self.block((), ins.result, ins.body)
            self.vals.extend(ins.result)
        elif op == "if":
            self.pop("i32")
            self.block(ins.result, ins.result, ins.body)
            self.block(ins.result, ins.result, ins.else_body)
            self.vals.extend(ins.result)
        elif op == "br":
            self.pop_all(self.label(ins.args[0]))
            self.unreachable()
        elif op == "br_if":
            self.pop("i32")
            types = self.label(ins.args[0])
            self.pop_all(types)
            self.vals.extend(types)
        elif op == "return":
            self.pop_all(self.ctrls[0].label_types)
            self.unreachable()
        else:
            self.fail(f"unknown instruction {op}")


def validate(mod: Module) -> None:
    """Raise ValidationError unless every function body is well typed."""
    for g in mod.globals:
        if g.type not in ("i32", "i64", "f32", "f64"):
            raise ValidationError(f"bad global type {g.type}")
    for f in mod.funcs:
        _Validator(mod, f).run()


# -- translation ------------------------------------------------------------

_NT = {"i32": ("I32",), "i64": ("I64",), "f32": ("F32",), "f64": ("F64",)}


def numtype(nt: str) -> tuple:
    return _NT[nt]


def value(nt: str, bits: int) -> tuple:
    return ("CONST", _NT[nt], bits)


def _opt(result) -> list:
    return [_NT[t] for t in result]


def instr_term(ins: Instr) -> tuple:
    op = ins.op
    cls = numeric_class(op)
    if cls is not None:
        kind, nt, name = cls
        if kind == "const":
            return ("CONST", _NT[nt], ins.args[0])
        return (kind.upper(), _NT[nt], (name.upper(),))
    if op == "block":
        return ("BLOCK", _opt(ins.result), [instr_term(i) for i in ins.body])
    if op == "loop":
        return ("LOOP", _opt(ins.result), [instr_term(i) for i in ins.body])
    if op == "if":
        return ("IF", _opt(ins.result), [instr_term(i) for i in ins.body],
                [instr_term(i) for i in ins.else_body])
    if ins.args:
        return (op.upper(), ins.args[0])
    return (op.upper(),)


def func_inst(f: Func) -> tuple:
    return ("FUNCINST", [_NT[t] for t in f.params], [_NT[t] for t in f.results],
            [_NT[t] for t in f.locals], [instr_term(i) for i in f.body])


def instantiate(mod: Module, fuel: int = 1_000_000) -> Config:
    """Validate ``mod`` and build a fresh configuration for it."""
    validate(mod)
    store = Store([func_inst(f) for f in mod.funcs],
                  [value(g.type, g.init) for g in mod.globals])
    return Config(store, fuel)
