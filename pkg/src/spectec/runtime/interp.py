"""Interpreter for AL algorithms.

Algorithms are compiled once into Python closures. Runtime values are plain
Python data: naturals are ints, constructor terms are tuples headed by the
constructor name (``("CONST", ("I32",), 5)``), sequences and options are lists.

The pending instruction sequence is kept reversed so the next instruction is
at the end of the list. Entering a label or frame pushes a context record and
an exit marker below the context's body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..al import ast as al
from ..il import ast as il
from . import numerics


class InterpreterBug(Exception):
    """An internal invariant failed; indicates a flaw in the rules or the animation."""


class ArgumentMismatch(Exception):
    pass


class Exhausted(Exception):
    """The step budget ran out."""


class _TrapSignal(Exception):
    pass


@dataclass(frozen=True)
class Values:
    values: tuple


@dataclass(frozen=True)
class Trap:
    pass


TrapResult = object  # Values | Trap


class Marker:
    __slots__ = ("ctx",)

    def __init__(self, ctx):
        self.ctx = ctx


class Context:
    __slots__ = ("kind", "fields", "height", "marker", "locals")

    def __init__(self, kind, fields, height, marker, locals_=None):
        self.kind = kind
        self.fields = fields
        self.height = height
        self.marker = marker
        self.locals = locals_


@dataclass(frozen=True)
class StateUpdate:
    target: str  # "local" | "global"
    index: int
    value: tuple


class Store:
    def __init__(self, funcs=(), globals_=()):
        self.funcs = list(funcs)  # FUNCINST terms
        self.globals = list(globals_)  # value terms


class Config:
    """Mutable interpreter state; one execution at a time."""

    def __init__(self, store: Store, fuel: int = 1_000_000):
        self.store = store
        self.stack: list = []
        self.contexts: list = []
        self.pending: list = []
        self.limit = fuel  # steps allowed per invoke
        self.fuel = fuel

    def frame(self) -> Context:
        for c in reversed(self.contexts):
            if c.kind == "FRAME_":
                return c
        raise InterpreterBug("no active frame")


def const(nt: str, bits: int) -> tuple:
    return ("CONST", (nt,), bits)


_NONE = object()


def _option_result(f: il.IlFunc) -> bool:
    return isinstance(f.result_type, il.IterT)


class Interpreter:
    """Executable semantics obtained from animated algorithms."""

    def __init__(self, algorithms, script: il.IlScript):
        self.script = script
        self.contexts = self._context_kinds(script)
        self.funcs: dict = {}
        self.instrs: dict = {}
        self.executed: set = set()
        for a in algorithms:
            if a.kind == "func":
                self.funcs[a.instruction_name[1:]] = None
        for a in algorithms:
            if a.kind == "func":
                self.funcs[a.instruction_name[1:]] = self._compile_function(a)
        for a in algorithms:
            if a.kind == "instr":
                self.instrs[a.instruction_name] = self._compile_instr(a)

    @staticmethod
    def _context_kinds(script) -> frozenset:
        from ..al.animate import _context_constructors
        return frozenset(_context_constructors(script))

    # -- expressions ----------------------------------------------------

    def expr(self, e):
        if isinstance(e, al.NameE):
            name = e.name

            def f(env, cfg):
                try:
                    return env[name]
                except KeyError:
                    raise InterpreterBug(f"unbound variable {name}") from None
            return f
        if isinstance(e, al.NumE):
            v = e.value
            return lambda env, cfg: v
        if isinstance(e, al.ConstructE):
            if not e.args:
                term = (e.constructor,)
                return lambda env, cfg: term
            con = e.constructor
            args = [self.expr(a) for a in e.args]
            if len(args) == 1:
                a0 = args[0]
                return lambda env, cfg: (con, a0(env, cfg))
            if len(args) == 2:
                a0, a1 = args
                return lambda env, cfg: (con, a0(env, cfg), a1(env, cfg))
            return lambda env, cfg: (con, *[a(env, cfg) for a in args])
        if isinstance(e, al.AppE):
            return self._app(e)
        if isinstance(e, al.ListE):
            elems = [self.expr(x) for x in e.elements]
            return lambda env, cfg: [x(env, cfg) for x in elems]
        if isinstance(e, al.CatE):
            parts = [self.expr(x) for x in e.parts]

            def cat(env, cfg):
                out = []
                for p in parts:
                    out.extend(p(env, cfg))
                return out
            return cat
        if isinstance(e, al.TupleE):
            args = [self.expr(a) for a in e.args]
            return lambda env, cfg: ("TUPLE", *[a(env, cfg) for a in args])
        if isinstance(e, al.LengthE):
            arg = self.expr(e.arg)
            return lambda env, cfg: len(arg(env, cfg))
        if isinstance(e, al.IterE):
            return self._iter(e)
        if isinstance(e, al.BinE):
            lhs, rhs = self.expr(e.lhs), self.expr(e.rhs)
            if e.op == "+":
                return lambda env, cfg: lhs(env, cfg) + rhs(env, cfg)

            def minus(env, cfg):
                r = lhs(env, cfg) - rhs(env, cfg)
                if r < 0:
                    raise InterpreterBug("natural subtraction underflow")
                return r
            return minus
        if isinstance(e, al.IdxE):
            arg, idx = self.expr(e.arg), self.expr(e.index)
            return lambda env, cfg: arg(env, cfg)[idx(env, cfg)]
        if isinstance(e, al.OptSomeE):
            arg = self.expr(e.arg)
            return lambda env, cfg: [arg(env, cfg)]
        if isinstance(e, al.OptNoneE):
            return lambda env, cfg: []
        if isinstance(e, al.CurrentContextE):
            kind = e.constructor

            def current(env, cfg):
                c = cfg.contexts[-1] if cfg.contexts else None
                if c is None or c.kind != kind:
                    raise InterpreterBug(f"innermost context is not {kind}")
                if c.locals is not None:
                    return (kind, c.fields[0], ("LOCALS", list(c.locals)))
                return (kind, *c.fields)
            return current
        if isinstance(e, al.CurrentStateE):
            return lambda env, cfg: cfg
        raise InterpreterBug(f"cannot evaluate {e!r}")

    def _iter(self, e: al.IterE):
        body = e.body
        if isinstance(body, al.NameE):
            return self.expr(body) if body.name in e.names else self._broadcast(e)
        return self._broadcast(e)

    def _broadcast(self, e: al.IterE):
        body = self.expr(e.body)
        names = list(e.names)
        count = self.expr(e.count) if e.count is not None else None

        def it(env, cfg):
            if names:
                seqs = [env[n] for n in names]
                n = len(seqs[0])
            else:
                seqs, n = [], count(env, cfg)
            out = []
            for i in range(n):
                inner = dict(env)
                for name, seq in zip(names, seqs):
                    inner[name] = seq[i]
                out.append(body(inner, cfg))
            return out
        return it

    def _app(self, e: al.AppE):
        name = e.function
        args = [self.expr(a) for a in e.args]
        if name in self.funcs:
            funcs = self.funcs

            def call(env, cfg):
                return funcs[name]([a(env, cfg) for a in args], cfg)
            return call
        decl = self.script.func_table.get(name)
        if name in numerics.PRIMITIVES:
            prim = numerics.PRIMITIVES[name]
            option = decl is not None and _option_result(decl)
            if len(args) == 3 and not option:
                a0, a1, a2 = args
                return lambda env, cfg: prim(a0(env, cfg)[0], a1(env, cfg), a2(env, cfg))
            if len(args) == 2 and not option:
                a0, a1 = args
                return lambda env, cfg: prim(a0(env, cfg)[0], a1(env, cfg))

            def prim_call(env, cfg):
                vals = [a(env, cfg) for a in args]
                r = prim(vals[0][0], *vals[1:])
                if option:
                    return [] if r is None else [r]
                return r
            return prim_call
        state_prim = _STATE_PRIMS.get(name)
        if state_prim is None:
            raise InterpreterBug(f"no implementation for ${name}")
        return lambda env, cfg: state_prim(*[a(env, cfg) for a in args])

    # -- patterns -------------------------------------------------------

    def pattern(self, p):
        """Compile ``p`` into match(value, env) -> bool, binding into env."""
        if isinstance(p, al.NameE):
            name = p.name

            def m(v, env):
                if name in env:
                    return env[name] == v
                env[name] = v
                return True
            return m
        if isinstance(p, al.NumE):
            n = p.value
            return lambda v, env: v == n
        if isinstance(p, al.ConstructE):
            con = p.constructor
            subs = [self.pattern(a) for a in p.args]
            size = len(subs) + 1

            def mc(v, env):
                if type(v) is not tuple or len(v) != size or v[0] != con:
                    return False
                for i, s in enumerate(subs):
                    if not s(v[i + 1], env):
                        return False
                return True
            return mc
        if isinstance(p, al.ListE):
            subs = [self.pattern(x) for x in p.elements]

            def ml(v, env):
                if len(v) != len(subs):
                    return False
                return all(s(x, env) for s, x in zip(subs, v))
            return ml
        if isinstance(p, al.IterE):
            count_name = p.count.name if isinstance(p.count, al.NameE) else None
            count = self.expr(p.count) if p.count is not None and count_name is None else None
            if isinstance(p.body, al.NameE):
                inner = self.pattern(p.body)
                opt = p.iter == "?"

                def mi(v, env):
                    if opt and len(v) > 1:
                        return False
                    if count_name is not None:
                        if count_name in env:
                            if env[count_name] != len(v):
                                return False
                        else:
                            env[count_name] = len(v)
                    elif count is not None and count(env, None) != len(v):
                        return False
                    return inner(list(v), env)
                return mi
            raise InterpreterBug("iterated patterns must iterate a single name")
        raise InterpreterBug(f"unsupported pattern {p!r}")

    # -- conditions -----------------------------------------------------

    def cond(self, c):
        if isinstance(c, al.CompareC):
            lhs, rhs = self.expr(c.lhs), self.expr(c.rhs)
            op = c.op
            if op == "is":
                return lambda env, cfg: lhs(env, cfg) == rhs(env, cfg)
            if op == "ne":
                return lambda env, cfg: lhs(env, cfg) != rhs(env, cfg)
            if op == "lt":
                return lambda env, cfg: lhs(env, cfg) < rhs(env, cfg)
            if op == "le":
                return lambda env, cfg: lhs(env, cfg) <= rhs(env, cfg)
            if op == "gt":
                return lambda env, cfg: lhs(env, cfg) > rhs(env, cfg)
            if op == "ge":
                return lambda env, cfg: lhs(env, cfg) >= rhs(env, cfg)
        if isinstance(c, al.TopValueC):
            t = self.expr(c.type_expr) if c.type_expr is not None else None

            def top(env, cfg):
                s = cfg.stack
                base = cfg.contexts[-1].height if cfg.contexts else 0
                if len(s) <= base:
                    return False
                return t is None or s[-1][1] == t(env, cfg)
            return top
        if isinstance(c, al.TopValuesC):
            n = self.expr(c.count)

            def tops(env, cfg):
                base = cfg.contexts[-1].height if cfg.contexts else 0
                return len(cfg.stack) - base >= n(env, cfg)
            return tops
        if isinstance(c, al.TopContextC):
            kind = c.constructor
            return lambda env, cfg: bool(cfg.contexts) and cfg.contexts[-1].kind == kind
        if isinstance(c, al.IsDefinedC):
            arg = self.expr(c.arg)
            return lambda env, cfg: len(arg(env, cfg)) == 1
        if isinstance(c, al.NotC):
            inner = self.cond(c.cond)
            return lambda env, cfg: not inner(env, cfg)
        if isinstance(c, al.AndC):
            parts = [self.cond(x) for x in c.conds]
            return lambda env, cfg: all(p(env, cfg) for p in parts)
        raise InterpreterBug(f"cannot evaluate condition {c!r}")

    # -- instructions ---------------------------------------------------

    def body(self, instrs):
        fns = [self.instr(i) for i in instrs]
        if len(fns) == 1:
            return fns[0]

        def run(env, cfg):
            for f in fns:
                r = f(env, cfg)
                if r is not _NONE:
                    return r
            return _NONE
        return run

    def instr(self, i):
        if isinstance(i, al.AssertI):
            c = self.cond(i.cond)
            text = repr(i.cond)

            def assert_(env, cfg):
                if not c(env, cfg):
                    raise InterpreterBug(f"assertion failed: {text}")
                return _NONE
            return assert_
        if isinstance(i, al.PopI):
            return self._pop(i.pattern)
        if isinstance(i, al.PopAllI):
            m = self.pattern(i.pattern)

            def pop_all(env, cfg):
                base = cfg.contexts[-1].height if cfg.contexts else 0
                vals = cfg.stack[base:]
                del cfg.stack[base:]
                if not m(vals, env):
                    raise InterpreterBug("popped values do not match")
                return _NONE
            return pop_all
        if isinstance(i, al.PushI):
            e = self.expr(i.expr)
            many = isinstance(i.expr, (al.IterE, al.ListE, al.CatE))

            def push(env, cfg):
                v = e(env, cfg)
                if many or type(v) is list:
                    cfg.stack.extend(v)
                else:
                    cfg.stack.append(v)
                return _NONE
            return push
        if isinstance(i, al.LetI):
            m = self.pattern(i.pattern)
            e = self.expr(i.expr)

            def let(env, cfg):
                if not m(e(env, cfg), env):
                    raise InterpreterBug(f"let binding failed: {i.pattern!r}")
                return _NONE
            return let
        if isinstance(i, al.IfI):
            c = self.cond(i.cond)
            then = self.body(i.then_body) if i.then_body else None
            other = self.body(i.else_body) if i.else_body else None

            def if_(env, cfg):
                if c(env, cfg):
                    return then(env, cfg) if then is not None else _NONE
                return other(env, cfg) if other is not None else _NONE
            return if_
        if isinstance(i, al.TrapI):
            def trap(env, cfg):
                raise _TrapSignal()
            return trap
        if isinstance(i, al.ReturnI):
            e = self.expr(i.expr) if i.expr is not None else (lambda env, cfg: None)
            return lambda env, cfg: e(env, cfg)
        if isinstance(i, al.ExecuteI):
            e = self.expr(i.expr)

            def execute(env, cfg):
                v = e(env, cfg)
                if type(v) is list:
                    cfg.pending.extend(reversed(v))
                else:
                    cfg.pending.append(v)
                return _NONE
            return execute
        if isinstance(i, al.ExitI):
            kind = i.constructor

            def exit_(env, cfg):
                ctx = cfg.contexts.pop()
                if ctx.kind != kind:
                    raise InterpreterBug(f"exiting {kind} but innermost context is {ctx.kind}")
                if len(cfg.stack) != ctx.height:
                    raise InterpreterBug("values left behind when leaving a context")
                pending = cfg.pending
                marker = ctx.marker
                while pending:
                    if pending.pop() is marker:
                        break
                return _NONE
            return exit_
        if isinstance(i, al.PerformI):
            e = self.expr(i.expr)

            def perform(env, cfg):
                u = e(env, cfg)
                if u.target == "local":
                    cfg.frame().locals[u.index] = u.value
                else:
                    cfg.store.globals[u.index] = u.value
                return _NONE
            return perform
        if isinstance(i, al.NopI):
            return lambda env, cfg: _NONE
        raise InterpreterBug(f"cannot execute {i!r}")

    def _pop(self, p):
        if isinstance(p, al.IterE):
            m = self.pattern(p)
            count = self.expr(p.count) if p.count is not None else None

            def pop_n(env, cfg):
                n = count(env, cfg)
                base = cfg.contexts[-1].height if cfg.contexts else 0
                if len(cfg.stack) - base < n:
                    raise InterpreterBug("value stack underflow")
                vals = cfg.stack[len(cfg.stack) - n:] if n else []
                del cfg.stack[len(cfg.stack) - n:]
                if not m(vals, env):
                    raise InterpreterBug("popped values do not match")
                return _NONE
            return pop_n
        m = self.pattern(p)

        def pop(env, cfg):
            base = cfg.contexts[-1].height if cfg.contexts else 0
            if len(cfg.stack) <= base:
                raise InterpreterBug("value stack underflow")
            if not m(cfg.stack.pop(), env):
                raise InterpreterBug(f"popped value does not match {p!r}")
            return _NONE
        return pop

    # -- algorithms -----------------------------------------------------

    def _compile_function(self, a: al.AlAlgorithm):
        names = [p.name for p in a.params]
        run = self.body(a.body)
        header = a.header

        def fn(args, cfg):
            env = dict(zip(names, args))
            r = run(env, cfg)
            if r is _NONE:
                raise InterpreterBug(f"{header}: no clause applies to {args!r}")
            return r
        return fn

    def _compile_instr(self, a: al.AlAlgorithm):
        matchers = [self.pattern(p) for p in a.params]
        simple = [p.name if isinstance(p, al.NameE) else
                  p.body.name if isinstance(p, al.IterE) and isinstance(p.body, al.NameE)
                  and p.count is None else None for p in a.params]
        run = self.body(a.body)
        name = a.instruction_name
        executed = self.executed

        def algo(term, cfg):
            env = {}
            for k, s in enumerate(simple):
                if s is not None:
                    env[s] = term[k + 1]
                elif not matchers[k](term[k + 1], env):
                    raise InterpreterBug(f"{name}: immediate does not match")
            executed.add(name)
            run(env, cfg)
        return algo

    # -- driving --------------------------------------------------------

    def step_instr(self, cfg: Config) -> None:
        """Execute the next pending item; raises _TrapSignal on a trap."""
        item = cfg.pending.pop()
        if type(item) is Marker:
            cfg.pending.append(item)
            self.instrs[item.ctx.kind]((item.ctx.kind,), cfg)
            return
        head = item[0]
        if head == "CONST":
            cfg.stack.append(item)
        elif head in self.contexts:
            self.enter(item, cfg)
        else:
            algo = self.instrs.get(head)
            if algo is None:
                raise InterpreterBug(f"no algorithm for {head}")
            algo(item, cfg)

    def enter(self, term, cfg: Config) -> None:
        kind = term[0]
        fields = term[1:-1]
        ctx = Context(kind, fields, len(cfg.stack), None,
                      list(fields[1][1]) if kind == "FRAME_" else None)
        ctx.marker = Marker(ctx)
        self.executed.add(kind)
        cfg.contexts.append(ctx)
        cfg.pending.append(ctx.marker)
        cfg.pending.extend(reversed(term[-1]))

    def run(self, cfg: Config) -> None:
        pending = cfg.pending
        stack = cfg.stack
        instrs = self.instrs
        contexts = self.contexts
        step = self.step_instr
        fuel = cfg.fuel
        while pending:
            fuel -= 1
            if fuel < 0:
                cfg.fuel = 0
                raise Exhausted()
            item = pending[-1]
            if type(item) is tuple:
                head = item[0]
                if head == "CONST":
                    pending.pop()
                    stack.append(item)
                    continue
                if head not in contexts:
                    pending.pop()
                    algo = instrs.get(head)
                    if algo is None:
                        raise InterpreterBug(f"no algorithm for {head}")
                    algo(item, cfg)
                    continue
            step(cfg)
        cfg.fuel = fuel

    def invoke(self, cfg: Config, function_index: int, args) -> object:
        """Call a function of the store with ``args``; returns Values or Trap."""
        store = cfg.store
        if not 0 <= function_index < len(store.funcs):
            raise ArgumentMismatch(f"no function {function_index}")
        fi = store.funcs[function_index]
        params, results = fi[1], fi[2]
        if len(args) != len(params) or any(
                a[0] != "CONST" or a[1] != t for a, t in zip(args, params)):
            raise ArgumentMismatch(f"function {function_index} expects {len(params)} argument(s) "
                                   f"of types {[t[0] for t in params]}")
        cfg.stack = list(args)
        cfg.contexts = [Context("FRAME_", (len(results), ("LOCALS", [])), 0, None, [])]
        cfg.pending = [("CALL_ADDR", function_index)]
        cfg.fuel = cfg.limit
        try:
            self.run(cfg)
        except _TrapSignal:
            cfg.stack, cfg.pending, cfg.contexts = [], [], []
            return Trap()
        if len(cfg.contexts) != 1 or len(cfg.stack) != len(results):
            raise InterpreterBug(f"stack discipline violated: {len(cfg.stack)} value(s) "
                                 f"left for {len(results)} result(s)")
        out = tuple(cfg.stack)
        cfg.stack, cfg.contexts = [], []
        return Values(out)

    def eval_expr(self, expr, env: dict, cfg: Optional[Config] = None):
        """Evaluate one AL expression (uncached; for tests and tools)."""
        return self.expr(expr)(env, cfg)


# -- state primitives -----------------------------------------------------

def _local(z: Config, x: int):
    return z.frame().locals[x]


def _global(z: Config, x: int):
    return z.store.globals[x]


_STATE_PRIMS = {
    "local": _local,
    "with_local": lambda z, x, v: StateUpdate("local", x, v),
    "global": _global,
    "with_global": lambda z, x, v: StateUpdate("global", x, v),
    "funcaddr": lambda z, x: x,
    "funcinst": lambda z, a: z.store.funcs[a],
}


def step_instr(interp: Interpreter, cfg: Config) -> Config:
    """Execute one pending item of ``cfg`` in place and return it."""
    try:
        interp.step_instr(cfg)
    except _TrapSignal:
        cfg.pending.clear()
        cfg.stack.clear()
        cfg.stack.append(("TRAP",))
    return cfg


def eval_expr(interp: Interpreter, expr, env: dict, cfg: Optional[Config] = None):
    return interp.eval_expr(expr, env, cfg)


def invoke(interp: Interpreter, cfg: Config, function_index: int, args) -> object:
    return interp.invoke(cfg, function_index, args)
