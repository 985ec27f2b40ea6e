"""Brute-force reading of IL reduction rules as relations.

Given a concrete configuration, every rule of every reduction relation is
tried: left-hand sides are matched by enumerating all ways of splitting
sequences, and premises are solved in every order in which they become
decidable. The result is the full set of one-step derivations. Nothing here
looks at AL; primitive numerics come from the test oracle.
"""

from __future__ import annotations

import itertools

from spectec.il import ast as il

import oracle


class Stuck(Exception):
    """A premise can never be decided (e.g. both sides stay unbound)."""


# -- state ----------------------------------------------------------------

class State:
    """Immutable store plus the current frame's locals."""

    def __init__(self, locals_=(), globals_=(), funcs=()):
        self.locals = tuple(locals_)
        self.globals = tuple(globals_)
        self.funcs = tuple(funcs)

    def key(self):
        return freeze((self.locals, self.globals, self.funcs))

    def __eq__(self, other):
        return isinstance(other, State) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"State(locals={self.locals}, globals={self.globals})"


def _with(seq, i, v):
    out = list(seq)
    out[i] = v
    return tuple(out)


STATE_FUNCS = {
    "local": lambda z, x: z.locals[x],
    "with_local": lambda z, x, v: State(_with(z.locals, x, v), z.globals, z.funcs),
    "global": lambda z, x: z.globals[x],
    "with_global": lambda z, x, v: State(z.locals, _with(z.globals, x, v), z.funcs),
    "funcaddr": lambda z, x: x,
    "funcinst": lambda z, a: z.funcs[a],
}


# -- numeric primitives via the oracle -------------------------------------

def _numeric(name: str, nt, *args):
    t = nt[0].lower()
    if name == "eqz":
        return int(args[0] == 0)
    if t[0] == "f":
        op = name[1:] if name.startswith("f") else name
        if len(args) == 1:
            return oracle.float_unop(t, op, args[0])
        if op in ("eq", "ne", "lt", "gt", "le", "ge"):
            return oracle.float_relop(t, op, *args)
        return oracle.float_binop(t, op, *args)
    if len(args) == 1:
        return oracle.int_unop(t, name, args[0])
    if name in ("eq", "ne") or name[:2] in ("lt", "gt", "le", "ge"):
        return oracle.int_relop(t, name, *args)
    try:
        return oracle.int_binop(t, name, *args)
    except oracle.OracleTrap:
        return None


# -- the engine ----------------------------------------------------------

def _is_list(t) -> bool:
    return isinstance(t, il.IterT)


class Relations:
    def __init__(self, script: il.IlScript):
        self.script = script

    # -- types

    def inhabits(self, v, t) -> bool:
        if isinstance(t, il.IterT):
            return isinstance(v, list) and (t.iter == "list" or len(v) <= 1) \
                and all(self.inhabits(x, t.base) for x in v)
        if isinstance(t, il.PrimT):
            return isinstance(v, int) and not isinstance(v, bool)
        if isinstance(t, il.TupleT):
            return isinstance(v, tuple) and len(v) == len(t.types) \
                and all(self.inhabits(x, u) for x, u in zip(v, t.types))
        syn = self.script.syntax_table[t.name]
        if syn.cases is None:
            return True
        for con, args in syn.cases:
            if con is None:
                if self.inhabits(v, args[0]):
                    return True
            elif isinstance(v, tuple) and v and v[0] == con and len(v) == len(args) + 1 \
                    and all(self.inhabits(x, u) for x, u in zip(v[1:], args)):
                return True
        return False

    # -- evaluation

    def ground(self, e, env) -> bool:
        return il.free_vars(e) <= env.keys()

    def eval(self, e, env):
        if isinstance(e, il.VarE):
            return env[e.name]
        if isinstance(e, il.NatE):
            return e.value
        if isinstance(e, il.ConE):
            return (e.constructor,) + tuple(self.eval(a, env) for a in e.args)
        if isinstance(e, il.TupleE):
            return tuple(self.eval(a, env) for a in e.args)
        if isinstance(e, il.ListE):
            return [self.eval(x, env) for x in e.elements]
        if isinstance(e, il.CatE):
            return [x for p in e.parts for x in self.eval(p, env)]
        if isinstance(e, il.OptE):
            return [] if e.payload is None else [self.eval(e.payload, env)]
        if isinstance(e, il.IterE):
            lists = [env[v] for v in e.vars]
            if e.count is not None:
                n = self.eval(e.count, env)
                if any(len(xs) != n for xs in lists):
                    raise Stuck(f"length mismatch in {e.vars}")
            else:
                n = len(lists[0]) if lists else 0
            out = []
            for k in range(n):
                inner = dict(env)
                inner.update({v: xs[k] for v, xs in zip(e.vars, lists)})
                out.append(self.eval(e.body, inner))
            return out
        if isinstance(e, il.LenE):
            return len(self.eval(e.arg, env))
        if isinstance(e, il.BinE):
            a, b = self.eval(e.lhs, env), self.eval(e.rhs, env)
            r = a + b if e.op == "+" else a - b
            if r < 0:
                raise Stuck("negative natural")
            return r
        if isinstance(e, il.IdxE):
            xs, i = self.eval(e.arg, env), self.eval(e.index, env)
            if not 0 <= i < len(xs):
                raise Stuck("index out of range")
            return xs[i]
        if isinstance(e, il.CastE):
            v = self.eval(e.arg, env)
            if _is_list(e.typ) and not _is_list(e.arg.typ):
                return [v]
            return v
        if isinstance(e, il.CallE):
            return self.call(e.function, [self.eval(a, env) for a in e.args])
        raise TypeError(f"cannot evaluate {e!r}")

    def call(self, name: str, args: list):
        f = self.script.func_table[name]
        if f.is_primitive:
            if name in STATE_FUNCS:
                return STATE_FUNCS[name](*args)
            r = _numeric(name, *args)
            if _is_list(f.result_type):
                return [] if r is None else [r]
            return r
        for clause in f.clauses:
            for env in self.match_all(list(clause.args), args, {}):
                for env2 in self.solve(list(clause.premises), env):
                    return self.eval(clause.result, env2)
        raise Stuck(f"${name}: no clause applies")

    # -- matching (nondeterministic)

    def match_all(self, pats, vals, env):
        if len(pats) != len(vals):
            return
        if not pats:
            yield env
            return
        for env2 in self.match(pats[0], vals[0], env):
            yield from self.match_all(pats[1:], vals[1:], env2)

    def match(self, p, v, env):
        if self.ground(p, env) and not isinstance(p, il.VarE):
            try:
                if self.eval(p, env) == v:
                    yield env
            except Stuck:
                pass
            return
        if isinstance(p, il.VarE):
            if p.name in env:
                if env[p.name] == v:
                    yield env
            elif self.inhabits(v, p.typ):
                yield {**env, p.name: v}
            return
        if isinstance(p, il.CastE):
            if _is_list(p.typ) and not _is_list(p.arg.typ):
                if isinstance(v, list) and len(v) == 1:
                    yield from self.match(p.arg, v[0], env)
                return
            yield from self.match(p.arg, v, env)
            return
        if isinstance(p, il.ConE):
            if isinstance(v, tuple) and v and v[0] == p.constructor:
                yield from self.match_all(list(p.args), list(v[1:]), env)
            return
        if isinstance(p, il.TupleE):
            if isinstance(v, tuple):
                yield from self.match_all(list(p.args), list(v), env)
            return
        if isinstance(p, il.OptE):
            if isinstance(v, list) and len(v) == (p.payload is not None):
                if p.payload is None:
                    yield env
                else:
                    yield from self.match(p.payload, v[0], env)
            return
        if isinstance(p, il.ListE):
            if isinstance(v, list):
                yield from self.match_all(list(p.elements), v, env)
            return
        if isinstance(p, il.CatE):
            if isinstance(v, list):
                yield from self._match_cat(list(p.parts), v, env)
            return
        if isinstance(p, il.IterE):
            yield from self._match_iter(p, v, env)
            return
        raise Stuck(f"cannot match against {type(p).__name__}")

    def _match_cat(self, parts, vals, env):
        if not parts:
            if not vals:
                yield env
            return
        for k in range(len(vals) + 1):
            for env2 in self.match(parts[0], vals[:k], env):
                yield from self._match_cat(parts[1:], vals[k:], env2)

    def _match_iter(self, p: il.IterE, v, env):
        if not isinstance(v, list) or (p.iter == "option" and len(v) > 1):
            return
        outer = {k: x for k, x in env.items() if k not in p.vars}
        if p.count is not None:
            if self.ground(p.count, env):
                if self.eval(p.count, env) != len(v):
                    return
            elif isinstance(p.count, il.VarE):
                if not self.inhabits(len(v), p.count.typ):
                    return
                outer[p.count.name] = len(v)
            else:
                raise Stuck("iteration count is not a variable")
        # every element matched independently; collect iterated variables
        per_elem = []
        for x in v:
            per_elem.append(list(self.match(p.body, x, dict(outer))))
            if not per_elem[-1]:
                return
        for combo in itertools.product(*per_elem):
            out = dict(outer)
            ok = True
            for name in p.vars:
                seq = [e[name] for e in combo]
                if name in env and env[name] != seq:
                    ok = False
                    break
                out[name] = seq
            for e in combo:  # non-iterated bindings made inside must agree
                for k, x in e.items():
                    if k in p.vars:
                        continue
                    if k in out and out[k] != x:
                        ok = False
                    out[k] = x
            if ok:
                yield out

    # -- premises (every decidable order)

    def solve(self, premises, env):
        seen = set()
        for out in self._solve(premises, env):
            key = tuple(sorted((k, repr(x)) for k, x in out.items()))
            if key not in seen:
                seen.add(key)
                yield out

    def _solve(self, premises, env):
        if not premises:
            yield env
            return
        progressed = False
        for i, p in enumerate(premises):
            rest = premises[:i] + premises[i + 1:]
            if isinstance(p, il.ElsePr):
                progressed = True
                yield from self._solve(rest, env)
                continue
            if not isinstance(p, il.IfPr):
                raise Stuck("iterated premise")
            gl, gr = self.ground(p.lhs, env), self.ground(p.rhs, env)
            try:
                if gl and gr:
                    progressed = True
                    if _compare(p.op, self.eval(p.lhs, env), self.eval(p.rhs, env)):
                        yield from self._solve(rest, env)
                elif p.op == "=" and (gl or gr):
                    progressed = True
                    known, pat = (p.lhs, p.rhs) if gl else (p.rhs, p.lhs)
                    value = self.eval(known, env)
                    for env2 in self.match(pat, value, env):
                        yield from self._solve(rest, env2)
            except Stuck:
                continue
        if not progressed:
            raise Stuck(f"no premise decidable with {sorted(env)}")

    # -- one reduction step

    def derivations(self, state: State, seq: list) -> set:
        """All ``(rule_id, state', seq')`` reachable in one step from ``state; seq``."""
        out = set()
        for rel in self.script.relation_table.values():
            if rel.kind != "~>":
                continue
            fired_heads: set = set()
            deferred = []
            for rule in rel.rules:
                if any(isinstance(p, il.ElsePr) for p in rule.premises):
                    deferred.append(rule)
                    continue
                found = self._apply(rule, state, seq)
                if found:
                    fired_heads.add(_head(rule))
                out |= found
            for rule in deferred:
                if _head(rule) not in fired_heads:
                    out |= self._apply(rule, state, seq)
        return out

    def _apply(self, rule: il.IlRule, state: State, seq: list) -> set:
        out = set()
        env0 = {} if rule.lhs_state is None else {rule.lhs_state.name: state}
        for env in self.match(rule.lhs, seq, env0):
            for env2 in self.solve(list(rule.premises), env):
                new_state = state if rule.rhs_state is None else self.eval(rule.rhs_state, env2)
                rhs = self.eval(rule.rhs, env2)
                out.add((rule.rule_id, new_state, freeze(rhs)))
        return out


def _head(rule: il.IlRule):
    """Constructor of the instruction a rule reduces (its last LHS element)."""
    parts = rule.lhs
    while True:
        parts = il.strip_casts(parts)
        if isinstance(parts, il.ListE):
            parts = parts.elements[-1]
        elif isinstance(parts, il.CatE):
            parts = parts.parts[-1]
        else:
            break
    return parts.constructor if isinstance(parts, il.ConE) else None


def _compare(op, a, b) -> bool:
    return {"=": a == b, "=/=": a != b, "<": a < b, "<=": a <= b,
            ">": a > b, ">=": a >= b}[op]


def freeze(v):
    if isinstance(v, list):
        return ("[",) + tuple(freeze(x) for x in v)
    if isinstance(v, tuple):
        return tuple(freeze(x) for x in v)
    return v
