"""Standalone re-checker for elaborated scripts.

Each node's type is re-derived from its children and compared against the
stored annotation. Returns a list of human-readable problems (empty when sound).
"""

from __future__ import annotations

from . import ast as il
from .ast import NAT, IterT, PrimT, SynT, TupleT


class _Verifier:
    def __init__(self, script: il.IlScript):
        self.s = script
        self.problems: list[str] = []

    def bad(self, where: str, msg: str):
        self.problems.append(f"{where}: {msg}")

    def one_level_cast(self, sub, sup) -> bool:
        if isinstance(sub, IterT) and isinstance(sup, IterT):
            return sub.iter == sup.iter and (sub.base == sup.base or
                                             self.one_level_cast(sub.base, sup.base))
        if not isinstance(sup, SynT) or sup.name not in self.s.syntax_table:
            return False
        return sub in self.s.syntax_table[sup.name].injections()

    def exp(self, e, env: dict, where: str):
        if isinstance(e, il.VarE):
            if env.get(e.name) != e.typ:
                self.bad(where, f"variable {e.name} annotated {e.typ}, bound as {env.get(e.name)}")
            return
        for c in il.children(e):
            if not (isinstance(e, il.IterE) and c is e.body):
                self.exp(c, env, where)
        t = e.typ
        if isinstance(e, il.NatE):
            ok = isinstance(t, PrimT) and t.name in ("nat", "int_32", "int_64")
        elif isinstance(e, il.ConE):
            entry = self.s.constructors.get(e.constructor)
            ok = entry is not None and t == SynT(entry[0]) and \
                tuple(a.typ for a in e.args) == tuple(entry[1])
        elif isinstance(e, il.CallE):
            f = self.s.func_table.get(e.function)
            ok = f is not None and t == f.result_type and \
                tuple(a.typ for a in e.args) == tuple(f.param_types)
        elif isinstance(e, il.TupleE):
            ok = t == TupleT(tuple(a.typ for a in e.args))
        elif isinstance(e, il.ListE):
            ok = isinstance(t, IterT) and t.iter == "list" and all(x.typ == t.base for x in e.elements)
        elif isinstance(e, il.CatE):
            ok = isinstance(t, IterT) and t.iter == "list" and all(p.typ == t for p in e.parts)
        elif isinstance(e, il.OptE):
            ok = isinstance(t, IterT) and t.iter == "option" and \
                (e.payload is None or e.payload.typ == t.base)
        elif isinstance(e, il.IterE):
            inner = dict(env)
            for v in e.vars:
                vt = env.get(v)
                if not isinstance(vt, IterT):
                    self.bad(where, f"iterated variable {v} is not a sequence")
                    continue
                inner[v] = vt.base
            self.exp(e.body, inner, where)
            ok = t == IterT(e.body.typ, e.iter) and (e.count is None or e.count.typ == NAT)
        elif isinstance(e, il.LenE):
            ok = t == NAT and isinstance(e.arg.typ, IterT)
        elif isinstance(e, il.BinE):
            ok = t == NAT and e.lhs.typ == NAT and e.rhs.typ == NAT
        elif isinstance(e, il.IdxE):
            ok = isinstance(e.arg.typ, IterT) and t == e.arg.typ.base and e.index.typ == NAT
        elif isinstance(e, il.CastE):
            ok = self.one_level_cast(e.arg.typ, t)
        else:
            self.bad(where, f"unknown node {type(e).__name__}")
            return
        if not ok:
            self.bad(where, f"{type(e).__name__} annotated {t} does not match its children")

    def premise(self, p, env: dict, where: str):
        if isinstance(p, il.IfPr):
            self.exp(p.lhs, env, where)
            self.exp(p.rhs, env, where)
            if p.lhs.typ != p.rhs.typ:
                self.bad(where, f"premise compares {p.lhs.typ} with {p.rhs.typ}")
        elif isinstance(p, il.IterPr):
            inner = dict(env)
            for v in p.vars:
                if isinstance(env.get(v), IterT):
                    inner[v] = env[v].base
            self.premise(p.body, inner, where)

    def run(self) -> list[str]:
        for name, f in self.s.func_table.items():
            for i, c in enumerate(f.clauses):
                where = f"${name} clause {i + 1}"
                for a in c.args:
                    self.exp(a, c.bound_vars, where)
                self.exp(c.result, c.bound_vars, where)
                if c.result.typ != f.result_type:
                    self.bad(where, "result type differs from the declaration")
                for p in c.premises:
                    self.premise(p, c.bound_vars, where)
        for rel in self.s.relation_table.values():
            for r in rel.rules:
                where = r.qualified_id
                for e, t in ((r.lhs_state, rel.lhs_state), (r.lhs, rel.lhs),
                             (r.rhs_state, rel.rhs_state), (r.rhs, rel.rhs)):
                    if e is None:
                        continue
                    self.exp(e, r.bound_vars, where)
                    if e.typ != t:
                        self.bad(where, f"side typed {e.typ}, relation expects {t}")
                for p in r.premises:
                    self.premise(p, r.bound_vars, where)
        return self.problems


def verify(script: il.IlScript) -> list[str]:
    return _Verifier(script).run()


def dangling_references(script: il.IlScript) -> list[str]:
    """Names used by expressions that no table defines."""
    missing = []

    def visit(e):
        for n in il.walk(e):
            if isinstance(n, il.CallE) and n.function not in script.func_table:
                missing.append("$" + n.function)
            if isinstance(n, il.ConE) and n.constructor not in script.constructors:
                missing.append(n.constructor)
            for t in (getattr(n, "typ", None),):
                while isinstance(t, IterT):
                    t = t.base
                if isinstance(t, SynT) and t.name not in script.syntax_table:
                    missing.append(t.name)

    for f in script.func_table.values():
        for c in f.clauses:
            for e in (*c.args, c.result, *c.premises):
                visit(e)
    for r in script.rules():
        for e in (r.lhs_state, r.lhs, r.rhs_state, r.rhs, *r.premises):
            if e is not None:
                visit(e)
    return sorted(set(missing))
