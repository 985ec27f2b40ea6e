"""Animation: turn relational IL reduction rules into AL algorithms.

Each rule is first compiled into a flat plan of steps (pops, bindings, checks,
effects). Plans for the same instruction are then merged: their common prefix
is hoisted and each remainder becomes a guarded block.
"""

from __future__ import annotations

import dataclasses
from collections import OrderedDict
from typing import Optional

from ..diagnostics import SourceSpan, NO_SPAN
from ..il import ast as il
from . import ast as al

VALUE_SYNTAX = "val"

_CMP = {"=": "is", "=/=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}


class AnimationError(Exception):
    def __init__(self, rule_id: str, unresolvable_vars, span: SourceSpan = NO_SPAN, detail: str = ""):
        self.rule_id = rule_id
        self.unresolvable_vars = frozenset(unresolvable_vars)
        self.span = span
        names = ", ".join(sorted(self.unresolvable_vars))
        msg = detail or f"cannot bind {{{names}}}"
        super().__init__(f"{span}: rule {rule_id}: {msg}")


class CyclicDependency(Exception):
    def __init__(self, vars_):
        self.vars = frozenset(vars_)
        super().__init__("no premise order binds " + ", ".join(sorted(self.vars)))


# -- IL helpers ---------------------------------------------------------

def strip(e):
    return il.strip_casts(e)


def flatten(e) -> list:
    """Elements of a sequence-typed IL expression, casts removed at the top."""
    e = strip(e)
    if isinstance(e, il.ListE):
        return [strip(x) for x in e.elements]
    if isinstance(e, il.CatE):
        return [x for p in e.parts for x in flatten(p)]
    return [e]


def _core_type(t):
    while isinstance(t, il.IterT):
        t = t.base
    return t


def is_value(e) -> bool:
    e = strip(e)
    if isinstance(e, il.IterE):
        return is_value(e.body)
    return _core_type(e.typ) == il.SynT(VALUE_SYNTAX)


def is_sequence(e) -> bool:
    return isinstance(strip(e).typ, il.IterT)


def substitute(node, mapping: dict):
    """Rename variables simultaneously throughout an IL node."""
    if isinstance(node, il.VarE):
        return dataclasses.replace(node, name=mapping.get(node.name, node.name))
    if isinstance(node, tuple):
        return tuple(substitute(x, mapping) for x in node)
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        changes = {}
        for f in dataclasses.fields(node):
            v = getattr(node, f.name)
            if f.name == "vars" and isinstance(v, tuple):
                changes[f.name] = tuple(mapping.get(x, x) for x in v)
            elif isinstance(v, tuple) or (dataclasses.is_dataclass(v) and not isinstance(v, type)):
                changes[f.name] = substitute(v, mapping)
        return dataclasses.replace(node, **changes) if changes else node
    return node


# -- IL to AL expressions ---------------------------------------------------

def to_al(e):
    e = strip(e)
    if isinstance(e, il.VarE):
        return al.NameE(e.name)
    if isinstance(e, il.NatE):
        return al.NumE(e.value)
    if isinstance(e, il.ConE):
        return al.ConstructE(e.constructor, tuple(to_al(a) for a in e.args))
    if isinstance(e, il.CallE):
        return al.AppE(e.function, tuple(to_al(a) for a in e.args))
    if isinstance(e, il.TupleE):
        return al.TupleE(tuple(to_al(a) for a in e.args))
    if isinstance(e, il.ListE):
        return al.ListE(tuple(to_al(x) for x in e.elements))
    if isinstance(e, il.CatE):
        return al.CatE(tuple(to_al(p) for p in e.parts))
    if isinstance(e, il.OptE):
        # options are lists of length at most one
        return al.ListE(() if e.payload is None else (to_al(e.payload),))
    if isinstance(e, il.IterE):
        if e.iter == "option":
            kind = "?"
        else:
            kind = "*" if e.count is None else "^"
        count = to_al(e.count) if e.count is not None else None
        return al.IterE(to_al(e.body), kind, count, tuple(e.vars))
    if isinstance(e, il.LenE):
        return al.LengthE(to_al(e.arg))
    if isinstance(e, il.BinE):
        return al.BinE(e.op, to_al(e.lhs), to_al(e.rhs))
    if isinstance(e, il.IdxE):
        return al.IdxE(to_al(e.arg), to_al(e.index))
    raise TypeError(f"cannot translate {e!r}")


def _sequence_expr(items):
    """AL expression for a juxtaposed instruction sequence."""
    if len(items) == 1 and not is_sequence(items[0]):
        return to_al(items[0])
    groups, scalars = [], []
    for x in items:
        if is_sequence(x):
            if scalars:
                groups.append(al.ListE(tuple(scalars)))
                scalars = []
            groups.append(to_al(x))
        else:
            scalars.append(to_al(x))
    if scalars:
        groups.append(al.ListE(tuple(scalars)))
    return groups[0] if len(groups) == 1 else al.CatE(tuple(groups))


# -- premise dataflow ---------------------------------------------------

def invertible(e, bound: set) -> bool:
    """Can ``e`` act as a pattern that binds its unbound variables?"""
    e = strip(e)
    if isinstance(e, (il.VarE, il.NatE)):
        return True
    if isinstance(e, (il.ConE, il.TupleE)):
        return all(invertible(a, bound) for a in e.args)
    if isinstance(e, il.ListE):
        return all(invertible(x, bound) for x in e.elements)
    if isinstance(e, il.OptE):
        return e.payload is None or invertible(e.payload, bound)
    if isinstance(e, il.IterE):
        count_ok = e.count is None or isinstance(strip(e.count), il.VarE) or \
            not (il.free_vars(e.count) - bound)
        return count_ok and invertible(e.body, bound)
    if isinstance(e, il.CatE):
        open_parts = [p for p in e.parts if isinstance(strip(p), il.IterE) and strip(p).count is None
                      and il.free_vars(p) - bound]
        return len(open_parts) <= 1 and all(invertible(p, bound) for p in e.parts)
    return False


def classify(p, bound: set):
    """("checks",) or ("binds", vars, pattern, expr), or None when not yet ready."""
    if isinstance(p, il.ElsePr):
        return ("checks",)
    if isinstance(p, il.IterPr):
        if il.free_vars(p.body) - bound - set(p.vars):
            return None
        return ("checks",)
    fl = il.free_vars(p.lhs) - bound
    fr = il.free_vars(p.rhs) - bound
    if not fl and not fr:
        return ("checks",)
    if p.op != "=":
        return None
    if fl and not fr and invertible(p.lhs, bound) and il.free_vars(p.rhs):
        return ("binds", frozenset(fl), p.lhs, p.rhs)
    if fr and not fl and invertible(p.rhs, bound) and il.free_vars(p.lhs):
        return ("binds", frozenset(fr), p.rhs, p.lhs)
    return None


def premise_dataflow(premises, initially_bound) -> list:
    """Order premises so every binder's input side is bound first.

    Returns (premise, classification) pairs, classification being
    ``("binds", vars)`` or ``("checks",)``. The earliest ready premise in
    source order is always taken next.
    """
    bound = set(initially_bound)
    todo = list(premises)
    out = []
    while todo:
        for i, p in enumerate(todo):
            c = classify(p, bound)
            if c is not None:
                break
        else:
            unbound = set()
            for p in todo:
                for side in ((p.lhs, p.rhs) if isinstance(p, il.IfPr) else ()):
                    unbound |= il.free_vars(side) - bound
            raise CyclicDependency(unbound)
        todo.pop(i)
        if c[0] == "binds":
            bound |= c[1]
            out.append((p, ("binds", c[1])))
        else:
            out.append((p, ("checks",)))
    return out


def guard_partiality(let: al.LetI):
    """Guard needed so that ``let`` cannot fail to match; None when total."""
    pat = let.pattern
    if isinstance(pat, al.ListE):
        return al.CompareC("is", al.LengthE(let.expr), al.NumE(len(pat.elements))), let
    if isinstance(pat, al.IterE) and pat.iter == "^" and pat.count is not None \
            and not isinstance(pat.count, al.NameE):
        return al.CompareC("is", al.LengthE(let.expr), pat.count), let
    return None, let


def premise_cond(p) -> al.AlCond:
    if isinstance(p, il.IfPr):
        return al.CompareC(_CMP[p.op], to_al(p.lhs), to_al(p.rhs))
    raise AnimationError("?", (), p.span, "iterated premises are not supported by animation")


# -- rule plans -------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Step:
    kind: str  # check let assert pop popall ctx state otherwise exit perform push execute trap
    a: object = None
    b: object = None
    guard: object = None


def _context_constructors(script: il.IlScript) -> set:
    injected = {t for syn in script.syntax_table.values() for t in syn.injections()}
    out = set()
    for con, (syn, params) in script.constructors.items():
        if il.SynT(syn) in injected:
            continue
        if params and params[-1] == il.list_of(il.SynT(syn)):
            out.add(con)
    return out


@dataclasses.dataclass
class LhsShape:
    instr: str
    params: tuple  # IL argument expressions of the instruction
    operands: list  # values below the instruction, bottom first
    context: Optional[tuple]  # (constructor, field exprs) or None


def lhs_shape(rule: il.IlRule, contexts: set) -> LhsShape:
    items = flatten(rule.lhs)
    last = items[-1]
    if not isinstance(last, il.ConE):
        raise AnimationError(rule.qualified_id, (), rule.span, "left-hand side must end in an instruction")
    if last.constructor in contexts:
        if len(items) > 1:
            raise AnimationError(rule.qualified_id, (), rule.span,
                                 "operands outside an evaluation context are not supported")
        fields = tuple(last.args[:-1])
        body = flatten(last.args[-1])
        for i, x in enumerate(body):
            if not is_value(x):
                if not isinstance(x, il.ConE):
                    raise AnimationError(rule.qualified_id, (), rule.span,
                                         "context body must contain an instruction")
                return LhsShape(x.constructor, tuple(x.args), body[:i],
                                (last.constructor, fields))
        return LhsShape(last.constructor, (), body, (last.constructor, fields))
    for x in items[:-1]:
        if not is_value(x):
            raise AnimationError(rule.qualified_id, (), rule.span, "operands must be values")
    return LhsShape(last.constructor, tuple(last.args), items[:-1], None)


def _param_pattern(arg, index: int, taken: set):
    """(param AL expr, extra step or None) for one instruction immediate."""
    core = strip(arg)
    if isinstance(core, il.VarE):
        return al.NameE(core.name), None
    if isinstance(core, il.IterE) and isinstance(strip(core.body), il.VarE) and core.count is None:
        return to_al(core), None
    name = f"imm_{index}"
    while name in taken:
        name += "'"
    if not il.free_vars(core):
        return al.NameE(name), Step("check", al.CompareC("is", al.NameE(name), to_al(core)))
    return al.NameE(name), Step("let", to_al(core), al.NameE(name))


def _pattern_vars(p) -> set:
    """Names a pattern binds (iteration counts included)."""
    return al.names_in(p)


def plan_rule(rule: il.IlRule, shape: LhsShape) -> tuple[tuple, list]:
    """Compile one rule into (params, steps)."""
    rid = rule.qualified_id
    all_vars = set(rule.bound_vars)
    params, steps = [], []
    bound: set = set()
    for i, a in enumerate(shape.params):
        p, extra = _param_pattern(a, i, all_vars)
        params.append(p)
        bound |= _pattern_vars(p)
        if extra is not None:
            steps.append(extra)
            bound |= il.free_vars(a)
    initial = set(bound)

    premises = [p for p in rule.premises if not isinstance(p, il.ElsePr)]
    otherwise = any(isinstance(p, il.ElsePr) for p in rule.premises)

    # checks decidable from the immediates alone go first
    for p in list(premises):
        c = classify(p, initial)
        if c == ("checks",) and il.free_vars(p.lhs) | il.free_vars(p.rhs) <= initial:
            steps.append(Step("check", premise_cond(p)))
            premises.remove(p)

    if rule.lhs_state is not None:
        z = strip(rule.lhs_state)
        if not isinstance(z, il.VarE):
            raise AnimationError(rid, (), rule.span, "state pattern must be a variable")
        steps.append(Step("let", al.NameE(z.name), al.CurrentStateE()))
        bound.add(z.name)

    if shape.context is not None:
        con, fields = shape.context
        steps.append(Step("ctx", con))
        pat = al.ConstructE(con, tuple(to_al(f) for f in fields))
        steps.append(Step("let", pat, al.CurrentContextE(con)))
        bound |= set().union(*(il.free_vars(f) for f in fields)) if fields else set()

    pops = list(reversed(shape.operands))

    def pop_ready(x) -> bool:
        x = strip(x)
        if isinstance(x, il.IterE):
            if x.count is None:
                return True
            return not (il.free_vars(x.count) - bound)
        return True

    def emit_pop(x, bottom: bool):
        x = strip(x)
        if isinstance(x, il.IterE) or (isinstance(x, il.VarE) and is_sequence(x)):
            count = x.count if isinstance(x, il.IterE) else None
            if count is None:
                if not (bottom and shape.context is not None):
                    raise AnimationError(rid, il.free_vars(x), rule.span,
                                         "an unbounded operand sequence needs an enclosing context")
                steps.append(Step("popall", to_al(x)))
            else:
                steps.append(Step("assert", al.TopValuesC(to_al(count))))
                steps.append(Step("pop", to_al(x)))
        else:
            type_expr = None
            if isinstance(x, il.ConE) and x.args:
                t = strip(x.args[0])
                if not (il.free_vars(t) - bound):
                    type_expr = to_al(t)
            steps.append(Step("assert", al.TopValueC(type_expr)))
            steps.append(Step("pop", to_al(x)))
        bound.update(il.free_vars(x))

    while pops or premises:
        if pops and pop_ready(pops[0]):
            x = pops.pop(0)
            emit_pop(x, bottom=not pops)
            continue
        for i, p in enumerate(premises):
            c = classify(p, bound)
            if c is not None:
                break
        else:
            need = set()
            for p in premises:
                need |= (il.free_vars(p.lhs) | il.free_vars(p.rhs)) - bound
            for x in pops:
                need |= il.free_vars(x) - bound
            raise AnimationError(rid, need, rule.span)
        premises.pop(i)
        if c[0] == "checks":
            steps.append(Step("check", premise_cond(p)))
        else:
            let = al.LetI(to_al(c[2]), to_al(c[3]))
            guard, let = guard_partiality(let)
            steps.append(Step("let", let.pattern, let.expr, guard))
            bound |= c[1]
    if otherwise:
        steps.append(Step("otherwise"))

    if shape.context is not None:
        steps.append(Step("exit", shape.context[0]))

    # right-hand side
    if rule.rhs_state is not None:
        rs = strip(rule.rhs_state)
        ls = strip(rule.lhs_state) if rule.lhs_state is not None else None
        if not (isinstance(rs, il.VarE) and ls is not None and rs.name == getattr(ls, "name", None)):
            steps.append(Step("perform", to_al(rs)))
    items = flatten(rule.rhs)
    if len(items) == 1 and isinstance(items[0], il.ConE) and items[0].constructor == "TRAP":
        steps.append(Step("trap"))
    else:
        k = 0
        while k < len(items) and is_value(items[k]):
            steps.append(Step("push", to_al(items[k])))
            k += 1
        if k < len(items):
            steps.append(Step("execute", _sequence_expr(items[k:])))
    unbound = set()
    for s in steps:
        for part in (s.a, s.b):
            if part is not None and not isinstance(part, str) and s.kind in ("push", "execute", "perform"):
                unbound |= al.names_in(part) - bound
    if unbound:
        raise AnimationError(rid, unbound, rule.span)
    return tuple(params), steps


# -- lowering ------------------------------------------------------------

_HOISTABLE = {"assert", "pop", "popall", "let"}


def _step_instr(s: Step) -> al.AlInstr:
    if s.kind == "assert":
        return al.AssertI(s.a)
    if s.kind == "pop":
        return al.PopI(s.a)
    if s.kind == "popall":
        return al.PopAllI(s.a)
    if s.kind == "let":
        return al.LetI(s.a, s.b)
    if s.kind == "ctx":
        return al.AssertI(al.TopContextC(s.a))
    if s.kind == "exit":
        return al.ExitI(s.a)
    if s.kind == "perform":
        return al.PerformI(s.a)
    if s.kind == "push":
        return al.PushI(s.a)
    if s.kind == "execute":
        return al.ExecuteI(s.a)
    if s.kind == "trap":
        return al.TrapI()
    if s.kind == "return":
        return al.ReturnI(s.a)
    raise ValueError(s.kind)


def lower(steps: list) -> list:
    out: list = []
    for i, s in enumerate(steps):
        if s.kind == "check":
            return out + [al.IfI(s.a, tuple(lower(steps[i + 1:])), ())]
        if s.kind == "let" and s.guard is not None:
            return out + [al.IfI(s.guard, tuple([al.LetI(s.a, s.b)] + lower(steps[i + 1:])), ())]
        if s.kind == "otherwise":
            continue
        out.append(_step_instr(s))
    return out


def _pure_cond(c) -> bool:
    if isinstance(c, (al.TopValueC, al.TopValuesC, al.TopContextC)):
        return False
    return all(_pure_cond(x) for x in al.expr_children(c) if not isinstance(x, (al.NameE,)))


def _head_guard(rem: list, prior: list):
    """(guard condition, remaining body) of a merged rule's remainder."""
    if not rem:
        return None, []
    h = rem[0]
    if h.kind == "check":
        return h.a, lower(rem[1:])
    if h.kind == "let" and h.guard is not None:
        return h.guard, [al.LetI(h.a, h.b)] + lower(rem[1:])
    if h.kind == "ctx":
        return al.TopContextC(h.a), lower(rem[1:])
    if h.kind == "otherwise":
        prior = [g for g in prior if g is not None]
        if not prior:
            return None, lower(rem[1:])
        if len(prior) == 1:
            return al.NotC(prior[0]), lower(rem[1:])
        return al.AndC(tuple(al.NotC(g) for g in prior)), lower(rem[1:])
    return None, lower(rem)


def merge(plans: list) -> list:
    """Combine per-rule step lists into one algorithm body."""
    if len(plans) == 1:
        body = lower(plans[0])
        return body or [al.NopI()]
    n = 0
    while all(len(p) > n for p in plans) and plans[0][n].kind in _HOISTABLE and \
            plans[0][n].guard is None and all(p[n] == plans[0][n] for p in plans):
        n += 1
    prefix = lower(plans[0][:n])
    guards, bodies = [], []
    for p in plans:
        g, b = _head_guard(p[n:], guards)
        guards.append(g)
        bodies.append(b or [al.NopI()])
    if all(g is not None and _pure_cond(g) for g in guards):
        return prefix + [al.IfI(g, tuple(b), ()) for g, b in zip(guards, bodies)]
    if any(g is None for g in guards[:-1]):
        raise AnimationError("?", (), NO_SPAN, "rules overlap: only the last may be unconditional")
    acc: tuple = tuple(bodies[-1]) if guards[-1] is None else ()
    pairs = list(zip(guards, bodies))
    if guards[-1] is None:
        pairs = pairs[:-1]
    for g, b in reversed(pairs):
        acc = (al.IfI(g, tuple(b), acc),)
    return prefix + list(acc)


# -- driver ---------------------------------------------------------------

def _rename_to(rule: il.IlRule, shape: LhsShape, params0: tuple, contexts: set):
    mapping = {}
    for a, p in zip(shape.params, params0):
        core = strip(a)
        if isinstance(core, il.IterE):
            core = strip(core.body)
        target = p.body if isinstance(p, al.IterE) else p
        if isinstance(core, il.VarE) and isinstance(target, al.NameE) and core.name != target.name:
            mapping[core.name] = target.name
    if not mapping:
        return rule, shape
    rule = substitute(rule, mapping)
    rule.bound_vars = {mapping.get(k, k): v for k, v in rule.bound_vars.items()}
    return rule, lhs_shape(rule, contexts)


def animate_rule_group(rules: list, script: Optional[il.IlScript] = None,
                       contexts: Optional[set] = None) -> al.AlAlgorithm:
    """Merge all reduction rules of one instruction into a single algorithm."""
    if contexts is None:
        contexts = _context_constructors(script) if script is not None else {"LABEL_", "FRAME_"}
    shapes = [lhs_shape(r, contexts) for r in rules]
    names = {s.instr for s in shapes}
    if len(names) != 1:
        raise AnimationError(rules[0].qualified_id, (), rules[0].span,
                             "rules define different instructions: " + ", ".join(sorted(names)))
    plans = []
    params0 = None
    for rule, shape in zip(rules, shapes):
        if params0 is not None:
            rule, shape = _rename_to(rule, shape, params0, contexts)
        try:
            params, steps = plan_rule(rule, shape)
        except CyclicDependency as e:
            raise AnimationError(rule.qualified_id, e.vars, rule.span) from None
        if params0 is None:
            params0 = params
        elif params != params0:
            raise AnimationError(rule.qualified_id, (), rule.span, "immediates differ between rules")
        plans.append(steps)
    try:
        body = merge(plans)
    except AnimationError as e:
        raise AnimationError(rules[0].qualified_id, e.unresolvable_vars, rules[0].span,
                             str(e).split(": ", 2)[-1]) from None
    return al.AlAlgorithm(shapes[0].instr, params0, tuple(body), "instr",
                          tuple(r.qualified_id for r in rules))


def _param_name(f: il.IlFunc, i: int) -> str:
    for c in f.clauses:
        a = strip(c.args[i])
        if isinstance(a, il.VarE):
            return a.name
    t = _core_type(f.param_types[i])
    return getattr(t, "name", f"arg_{i}")


def animate_function(f: il.IlFunc) -> al.AlAlgorithm:
    names: list[str] = []
    for i in range(len(f.param_types)):
        n = _param_name(f, i)
        while n in names:
            n += "'"
        names.append(n)
    params = tuple(al.NameE(n) for n in names)
    body: list = []
    for k, c in enumerate(f.clauses):
        where = f"${f.name} clause {k + 1}"
        steps: list = []
        bound = set(names)
        for a, pname in zip(c.args, names):
            core = strip(a)
            if isinstance(core, il.VarE):
                if core.name != pname:
                    steps.append(Step("let", al.NameE(core.name), al.NameE(pname)))
                    bound.add(core.name)
            elif not il.free_vars(core):
                steps.append(Step("check", al.CompareC("is", al.NameE(pname), to_al(core))))
            else:
                raise AnimationError(where, il.free_vars(core), c.span,
                                     "structured argument patterns are not supported")
        try:
            ordered = premise_dataflow(c.premises, bound)
        except CyclicDependency as e:
            raise AnimationError(where, e.vars, c.span) from None
        for p, cls in ordered:
            if cls[0] == "checks":
                steps.append(Step("check", premise_cond(p)))
            else:
                kind = classify(p, bound)
                let = al.LetI(to_al(kind[2]), to_al(kind[3]))
                guard, let = guard_partiality(let)
                steps.append(Step("let", let.pattern, let.expr, guard))
                bound |= cls[1]
        missing = il.free_vars(c.result) - bound
        if missing:
            raise AnimationError(where, missing, c.span)
        steps.append(Step("return", to_al(c.result)))
        body.extend(lower(steps))
    return al.AlAlgorithm("$" + f.name, params, tuple(body), "func")


def instruction_groups(script: il.IlScript) -> "OrderedDict[str, list]":
    """Reduction rules grouped by the instruction they define, in source order."""
    contexts = _context_constructors(script)
    groups: OrderedDict = OrderedDict()
    for rel in script.relation_table.values():
        if rel.kind != "~>":
            continue
        for r in rel.rules:
            groups.setdefault(lhs_shape(r, contexts).instr, []).append(r)
    return groups


def animate(script: il.IlScript) -> list[al.AlAlgorithm]:
    """Algorithms for every instruction, then for every clause-defined function."""
    contexts = _context_constructors(script)
    out = [animate_rule_group(rules, contexts=contexts)
           for rules in instruction_groups(script).values()]
    out.extend(animate_function(f) for f in script.func_table.values() if not f.is_primitive)
    return out


def binding_problems(alg: al.AlAlgorithm) -> list[str]:
    """Variables read before any PopI, LetI or parameter binds them."""
    problems: list[str] = []

    def visit(body, bound: set):
        bound = set(bound)
        for i in body:
            if isinstance(i, (al.PopI, al.PopAllI)):
                bound |= _binders(i.pattern)
                reads = al.names_in(i.pattern) - bound
            elif isinstance(i, al.LetI):
                reads = al.names_in(i.expr) - bound
                bound |= _binders(i.pattern)
            elif isinstance(i, al.IfI):
                reads = al.names_in(i.cond) - bound
                visit(i.then_body, bound)
                visit(i.else_body, bound)
            elif isinstance(i, al.AssertI):
                reads = al.names_in(i.cond) - bound
            elif isinstance(i, (al.PushI, al.ExecuteI, al.PerformI)):
                reads = al.names_in(i.expr) - bound
            elif isinstance(i, al.ReturnI):
                reads = al.names_in(i.expr) - bound if i.expr is not None else set()
            else:
                reads = set()
            for n in sorted(reads):
                problems.append(f"{alg.header}: {n} read before it is bound")

    visit(alg.body, set().union(*(_binders(p) for p in alg.params)) if alg.params else set())
    return problems


def _binders(pattern) -> set:
    if isinstance(pattern, al.IterE):
        out = _binders(pattern.body)
        if isinstance(pattern.count, al.NameE):
            out.add(pattern.count.name)
        return out
    return al.names_in(pattern)
