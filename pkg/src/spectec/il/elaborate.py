"""Meta-level checking of the EL and elaboration into the typed IL.

Inference is local and bidirectional. Every expression node receives a type;
implicit coercions (injection into an enclosing sum type, lifting a scalar into
an option or singleton list) become explicit nodes.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from ..diagnostics import Diagnostic, SourceSpan, SpecError
from ..el import ast as el
from . import ast as il
from .ast import NAT, IterT, PrimT, SynT, TupleT, list_of, opt_of
from .deps import dependency_groups

_ITER_KIND = {"*": "list", "^": "list", "?": "option"}


class _Abort(Exception):
    """Stops elaborating the current expression after a reported error."""


def _strip_subscript(name: str) -> Optional[str]:
    head, sep, tail = name.rpartition("_")
    return head if sep and head and tail else None


class Elaborator:
    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.out = il.IlScript()
        self.syntax_names: dict[str, SourceSpan] = {}
        self.supers: dict = {}  # type -> list of SynT that inject it
        self.rule_ids: dict = {}
        # per-definition state
        self.mult: dict[str, tuple] = {}
        self.var_base: dict[str, il.IlType] = {}
        self.depth = 0

    # -- reporting ------------------------------------------------------

    def error(self, code: str, message: str, span: SourceSpan):
        self.diags.append(Diagnostic("error", code, message, span))

    def warning(self, code: str, message: str, span: SourceSpan):
        self.diags.append(Diagnostic("warning", code, message, span))

    def fail(self, code: str, message: str, span: SourceSpan):
        self.error(code, message, span)
        raise _Abort()

    # -- driver ---------------------------------------------------------

    def run(self, script: el.ElScript) -> il.IlScript:
        defs = script.defs
        for d in defs:
            if isinstance(d, el.SyntaxDef):
                if d.name in self.syntax_names or d.name in il.PRIM_TYPES:
                    self.error("E-DUP", f"syntax {d.name} is defined twice", d.span)
                else:
                    self.syntax_names[d.name] = d.span
        for d in defs:
            if isinstance(d, el.SyntaxDef) and self.syntax_names.get(d.name) is d.span:
                self._syntax(d)
        self._build_subtyping()
        for d in defs:
            if isinstance(d, el.VarDecl):
                self._var_decl(d)
        for d in defs:
            if isinstance(d, el.FuncDecl):
                self._func_decl(d)
            elif isinstance(d, el.RelationDecl):
                self._relation_decl(d)
        for d in defs:
            try:
                if isinstance(d, el.FuncClause):
                    self._func_clause(d)
                elif isinstance(d, el.RuleDef):
                    self._rule(d)
            except _Abort:
                pass
        for d in defs:
            kind = type(d).__name__
            name = getattr(d, "name", None) or getattr(d, "var_name", None)
            if isinstance(d, el.RuleDef):
                name = f"{d.relation_name}/{d.rule_id}"
            self.out.order.append((kind, name))
        if not any(d.is_error for d in self.diags):
            self.out.recursion_groups = dependency_groups(self.out)
        return self.out

    # -- types ----------------------------------------------------------

    def resolve_type(self, t: el.ElType) -> il.IlType:
        if t.name in il.PRIM_TYPES:
            base = PrimT(t.name)
        elif t.name in self.syntax_names:
            base = SynT(t.name)
        else:
            self.fail("E-UNDEF", f"unknown type {t.name}", t.span)
        if t.iter == "*":
            return list_of(base)
        if t.iter == "?":
            return opt_of(base)
        return base

    def _syntax(self, d: el.SyntaxDef):
        if d.cases is None:
            self.out.syntax_table[d.name] = il.IlSyntax(d.name, None, d.span)
            return
        cases = []
        for c in d.cases:
            try:
                args = tuple(self.resolve_type(a) for a in c.args)
            except _Abort:
                continue
            if c.constructor is not None:
                if not c.constructor.replace("_", "").replace(".", "").isalnum() or \
                        c.constructor != c.constructor.upper():
                    self.error("E-TYPE", f"constructor {c.constructor} must be upper case", c.span)
                if c.constructor in self.out.constructors:
                    self.error("E-DUP", f"constructor {c.constructor} is declared twice", c.span)
                    continue
                self.out.constructors[c.constructor] = (d.name, args)
            elif args[0] == SynT(d.name) or isinstance(args[0], IterT):
                self.error("E-TYPE", f"invalid injection case {args[0]} in {d.name}", c.span)
                continue
            cases.append((c.constructor, args))
        self.out.syntax_table[d.name] = il.IlSyntax(d.name, cases, d.span)

    def _build_subtyping(self):
        for syn in self.out.syntax_table.values():
            for t in syn.injections():
                self.supers.setdefault(t, []).append(SynT(syn.name))

    def upcast_path(self, sub, sup, span) -> Optional[list]:
        """Shortest injection chain from ``sub`` to ``sup`` (excluding ``sub``)."""
        if not isinstance(sup, SynT):
            return None
        prev = {sub: None}
        queue = deque([sub])
        found = []
        level = {sub: 0}
        while queue:
            t = queue.popleft()
            for s in self.supers.get(t, []):
                if s == sup:
                    found.append(t)
                if s not in prev:
                    prev[s] = t
                    level[s] = level[t] + 1
                    queue.append(s)
        if not found:
            return None
        best = min(level[t] for t in found)
        if sum(1 for t in found if level[t] == best) > 1:
            self.fail("E-TYPE", f"ambiguous upcast from {sub} to {sup}", span)
        chain = [sup]
        t = min((t for t in found if level[t] == best), key=lambda x: level[x])
        while t != sub:
            chain.append(t)
            t = prev[t]
        return list(reversed(chain))

    def is_subtype(self, sub, sup) -> bool:
        if sub == sup:
            return True
        if isinstance(sub, IterT) and isinstance(sup, IterT):
            return sub.iter == sup.iter and self.is_subtype(sub.base, sup.base)
        try:
            return self.upcast_path(sub, sup, None) is not None
        except _Abort:
            return False

    # -- declarations ---------------------------------------------------

    def _var_decl(self, d: el.VarDecl):
        try:
            t = self.resolve_type(d.type)
        except _Abort:
            return
        if d.var_name in self.out.var_types:
            self.error("E-DUP", f"variable {d.var_name} is declared twice", d.span)
        self.out.var_types[d.var_name] = t

    def _func_decl(self, d: el.FuncDecl):
        if d.name in self.out.func_table:
            self.error("E-DUP", f"function ${d.name} is declared twice", d.span)
            return
        try:
            params = tuple(self.resolve_type(t) for t in d.param_types)
            result = self.resolve_type(d.result_type)
        except _Abort:
            return
        self.out.func_table[d.name] = il.IlFunc(d.name, params, result, [], d.span)

    def _relation_decl(self, d: el.RelationDecl):
        if d.name in self.out.relation_table:
            self.error("E-DUP", f"relation {d.name} is declared twice", d.span)
            return
        try:
            def seq(ts):
                if ts is None:
                    return None
                tys = [self.resolve_type(t) for t in ts]
                return tys[0] if len(tys) == 1 else TupleT(tuple(tys))
            rel = il.IlRelation(d.name, d.kind, seq(d.lhs_state), seq(d.lhs),
                                seq(d.rhs_state), seq(d.rhs), [], d.span)
        except _Abort:
            return
        self.out.relation_table[d.name] = rel

    # -- variables and multiplicities -------------------------------------

    def declared_type(self, name: str) -> Optional[il.IlType]:
        n: Optional[str] = name
        while n:
            if n in self.out.var_types:
                return self.out.var_types[n]
            if n in self.syntax_names:
                return SynT(n)
            if n in il.PRIM_TYPES:
                return PrimT(n)
            n = _strip_subscript(n)
        return None

    def _collect(self, node, depth: tuple, occ: dict):
        if isinstance(node, el.VarE):
            occ.setdefault(node.full, []).append((depth, node.span))
            return
        if isinstance(node, el.IterE):
            self._collect(node.body, depth + (_ITER_KIND[node.iter],), occ)
            if node.count is not None:
                self._collect(node.count, depth, occ)
            return
        if isinstance(node, el.IterPremise):
            self._collect(node.body, depth + (_ITER_KIND[node.iter],), occ)
            return
        for c in el.children(node):
            self._collect(c, depth, occ)

    def setup_vars(self, nodes, extra_types: Optional[dict] = None) -> dict:
        """Infer multiplicities of all variables in ``nodes``; returns occurrences."""
        occ: dict = {}
        for n in nodes:
            if n is not None:
                self._collect(n, (), occ)
        self.mult = {}
        self.var_base = {}
        for name, uses in occ.items():
            depth0, _ = uses[0]
            for depth, span in uses[1:]:
                if depth != depth0:
                    self.error("E-MULT",
                               f"variable {name} used with multiplicity {_mult_str(depth)} "
                               f"but elsewhere with {_mult_str(depth0)}", span)
                    break
            self.mult[name] = depth0
            t = (extra_types or {}).get(name) or self.declared_type(name)
            if t is None:
                self.error("E-UNDEF", f"unknown metavariable {name} (no type declared)", uses[0][1])
                continue
            self.var_base[name] = t
        return occ

    def full_var_type(self, name: str) -> il.IlType:
        t = self.var_base[name]
        for kind in reversed(self.mult[name]):
            t = IterT(t, kind)
        return t

    # -- coercion -------------------------------------------------------

    def coerce(self, e, expected, span):
        t = e.typ
        if t == expected:
            return e
        if isinstance(expected, SynT) and not isinstance(t, (IterT, TupleT)):
            path = self.upcast_path(t, expected, span)
            if path:
                for step in path:
                    e = il.CastE(e, step, e.span)
                return e
        if isinstance(expected, IterT):
            if isinstance(t, IterT):
                if t.iter == expected.iter and self.is_subtype(t.base, expected.base):
                    return self._cast_elements(e, expected.base, expected.iter, span)
            else:
                inner = self.coerce(e, expected.base, span) if self._scalar_fits(t, expected.base) else None
                if inner is not None:
                    if expected.iter == "option":
                        return il.OptE(inner, expected, e.span)
                    return il.ListE((inner,), expected, e.span)
        return None

    def _scalar_fits(self, t, target) -> bool:
        return t == target or self.is_subtype(t, target)

    def _cast_elements(self, e, target_base, kind, span):
        base = e.typ.base
        if isinstance(base, IterT):
            return il.CastE(e, IterT(target_base, kind), e.span)
        path = self.upcast_path(base, target_base, span) or []
        for step in path:
            e = il.CastE(e, IterT(step, kind), e.span)
        return e

    def expect(self, e, expected, span):
        r = self.coerce(e, expected, span)
        if r is None:
            code = "E-MULT" if _iter_depth(e.typ) != _iter_depth(expected) and \
                _core(e.typ) == _core(expected) else "E-TYPE"
            self.fail(code, f"expression of type {e.typ} used where {expected} is required", span)
        return r

    # -- expressions ----------------------------------------------------

    def infer(self, e) -> Optional[object]:
        """Synthesize a typed IL node, or None when the form needs an expected type."""
        if isinstance(e, el.VarE):
            name = e.full
            if name not in self.var_base:
                raise _Abort()
            return il.VarE(name, self.var_base[name], e.span)
        if isinstance(e, el.NatE):
            return il.NatE(e.value, NAT, e.span)
        if isinstance(e, el.OptE):
            return None
        if isinstance(e, el.ConstructE):
            return self._construct(e)
        if isinstance(e, el.CallE):
            return self._call(e)
        if isinstance(e, el.SeqE):
            parts = []
            elem_t = None
            for x in e.elements:
                r = self.infer(x)
                if r is None:
                    return None
                t = r.typ.base if isinstance(r.typ, IterT) and r.typ.iter == "list" else r.typ
                elem_t = t if elem_t is None else self._join(elem_t, t, x.span)
                parts.append(r)
            return self._sequence([self.expect(p, list_of(elem_t), e.span) for p in parts],
                                  list_of(elem_t), e.span)
        if isinstance(e, el.TupleE):
            args = [self.infer(a) for a in e.args]
            if any(a is None for a in args):
                return None
            return il.TupleE(tuple(args), TupleT(tuple(a.typ for a in args)), e.span)
        if isinstance(e, el.ListE):
            if not e.elements:
                return None
            first = self.infer(e.elements[0])
            if first is None:
                return None
            return self.check(e, list_of(first.typ))
        if isinstance(e, el.IterE):
            return self._iter(e, None)
        if isinstance(e, el.LenE):
            arg = self.infer(e.arg)
            if arg is None or not isinstance(arg.typ, IterT):
                self.fail("E-TYPE", "length of a non-sequence", e.span)
            return il.LenE(arg, NAT, e.span)
        if isinstance(e, el.BinE):
            lhs = self.check(e.lhs, NAT)
            rhs = self.check(e.rhs, NAT)
            return il.BinE(e.op, lhs, rhs, NAT, e.span)
        if isinstance(e, el.IdxE):
            arg = self.infer(e.arg)
            if arg is None or not isinstance(arg.typ, IterT) or arg.typ.iter != "list":
                self.fail("E-TYPE", "indexing a non-list", e.span)
            idx = self.check(e.index, NAT)
            return il.IdxE(arg, idx, arg.typ.base, e.span)
        raise TypeError(f"unexpected EL node {e!r}")

    def _join(self, a, b, span):
        if self.is_subtype(a, b):
            return b
        if self.is_subtype(b, a):
            return a
        # least common supertype by breadth-first search upwards from a
        seen = []
        queue = deque([a])
        while queue:
            t = queue.popleft()
            seen.append(t)
            queue.extend(self.supers.get(t, []))
        for t in seen:
            if self.is_subtype(b, t):
                return t
        self.fail("E-TYPE", f"sequence mixes incompatible types {a} and {b}", span)

    def check(self, e, expected):
        if isinstance(e, el.NatE):
            if isinstance(expected, PrimT) and expected.name in ("int_32", "int_64"):
                return il.NatE(e.value, expected, e.span)
            return self.expect(il.NatE(e.value, NAT, e.span), expected, e.span)
        if isinstance(e, el.OptE):
            if isinstance(expected, IterT):
                if expected.iter == "option":
                    return il.OptE(None, expected, e.span)
                return il.ListE((), expected, e.span)
            self.fail("E-TYPE", f"epsilon used where {expected} is required", e.span)
        if isinstance(e, el.SeqE):
            if not isinstance(expected, IterT) or expected.iter != "list":
                self.fail("E-TYPE", f"sequence used where {expected} is required", e.span)
            parts = [self._seq_part(x, expected) for x in e.elements]
            return self._sequence(parts, expected, e.span)
        if isinstance(e, el.ListE):
            if not isinstance(expected, IterT) or expected.iter != "list":
                self.fail("E-TYPE", f"list used where {expected} is required", e.span)
            elems = tuple(self.check(x, expected.base) for x in e.elements)
            return il.ListE(elems, expected, e.span)
        if isinstance(e, el.IterE):
            r = self._iter(e, expected)
            return self.expect(r, expected, e.span)
        if isinstance(e, el.TupleE) and isinstance(expected, TupleT):
            if len(e.args) != len(expected.types):
                self.fail("E-ARITY", f"tuple of {len(e.args)} where {len(expected.types)} expected", e.span)
            args = tuple(self.check(a, t) for a, t in zip(e.args, expected.types))
            return il.TupleE(args, expected, e.span)
        r = self.infer(e)
        if r is None:
            self.fail("E-TYPE", f"cannot determine the type of this expression", e.span)
        return self.expect(r, expected, e.span)

    def _seq_part(self, x, expected):
        if isinstance(x, el.OptE):
            return il.ListE((), expected, x.span)
        r = self.infer(x)
        if r is None:
            return self.check(x, expected)
        if isinstance(r.typ, IterT) and r.typ.iter == "list":
            return self.expect(r, expected, x.span)
        return self.expect(r, expected.base, x.span)

    @staticmethod
    def _sequence(parts, expected, span):
        """Group scalar parts into list literals and concatenate."""
        groups: list = []
        pending: list = []
        for p in parts:
            if p.typ == expected:
                if isinstance(p, il.ListE):
                    pending.extend(p.elements)
                    continue
                if pending:
                    groups.append(il.ListE(tuple(pending), expected, span))
                    pending = []
                groups.append(p)
            else:
                pending.append(p)
        if pending or not groups:
            groups.append(il.ListE(tuple(pending), expected, span))
        if len(groups) == 1:
            return groups[0]
        return il.CatE(tuple(groups), expected, span)

    def _construct(self, e: el.ConstructE):
        entry = self.out.constructors.get(e.constructor)
        if entry is None:
            self.fail("E-UNDEF", f"unknown constructor {e.constructor}", e.span)
        syn, params = entry
        args = list(e.args)
        if len(args) > len(params) and params and isinstance(params[-1], IterT) \
                and params[-1].iter == "list":
            # surplus juxtaposed arguments form the trailing sequence argument
            tail = args[len(params) - 1:]
            args = args[:len(params) - 1] + [el.SeqE(tail, tail[0].span.to(tail[-1].span))]
        if len(args) != len(params):
            self.fail("E-ARITY", f"constructor {e.constructor} expects {len(params)} "
                      f"argument(s), got {len(e.args)}", e.span)
        checked = []
        for a, t in zip(args, params):
            checked.append(self.check(a, t))
        return il.ConE(e.constructor, tuple(checked), SynT(syn), e.span)

    def _call(self, e: el.CallE):
        f = self.out.func_table.get(e.function)
        if f is None:
            self.fail("E-UNDEF", f"unknown function ${e.function}", e.span)
        if len(e.args) != len(f.param_types):
            # report and keep going with the declared result type
            self.error("E-ARITY", f"function ${e.function} expects {len(f.param_types)} "
                       f"argument(s), got {len(e.args)}", e.span)
            args = []
            for a, t in zip(e.args, f.param_types):
                try:
                    args.append(self.check(a, t))
                except _Abort:
                    pass
            return il.CallE(e.function, tuple(args), f.result_type, e.span)
        args = tuple(self.check(a, t) for a, t in zip(e.args, f.param_types))
        return il.CallE(e.function, args, f.result_type, e.span)

    def _iter(self, e: el.IterE, expected):
        kind = _ITER_KIND[e.iter]
        names = sorted(v for v in el.free_vars(e.body) if len(self.mult.get(v, ())) > self.depth)
        if not names:
            self.fail("E-MULT", "iteration over an expression without iterated variables", e.span)
        count = self.check(e.count, NAT) if e.count is not None else None
        self.depth += 1
        try:
            if isinstance(expected, IterT) and expected.iter == kind:
                body = self.check(e.body, expected.base)
            else:
                body = self.infer(e.body)
                if body is None:
                    self.fail("E-TYPE", "cannot determine the type of the iterated expression", e.span)
        finally:
            self.depth -= 1
        if kind == "option" and isinstance(body.typ, IterT) and body.typ.iter == "option":
            self.fail("E-MULT", "doubly optional expression", e.span)
        return il.IterE(body, kind, count, tuple(names), IterT(body.typ, kind), e.span)

    # -- premises -------------------------------------------------------

    def premise(self, p):
        if isinstance(p, el.ElsePremise):
            return il.ElsePr(p.span)
        if isinstance(p, el.IterPremise):
            kind = _ITER_KIND[p.iter]
            names = sorted(v for v in el.free_vars(p.body) if len(self.mult.get(v, ())) > self.depth)
            self.depth += 1
            try:
                body = self.premise(p.body)
            finally:
                self.depth -= 1
            return il.IterPr(body, kind, tuple(names), p.span)
        if p.op in ("=", "=/="):
            lhs = self.infer(p.lhs)
            if lhs is None:
                rhs = self.infer(p.rhs)
                if rhs is None:
                    self.fail("E-TYPE", "cannot determine the type of either side", p.span)
                lhs = self.check(p.lhs, rhs.typ)
                return il.IfPr(lhs, p.op, rhs, p.span)
            rhs = self.infer(p.rhs)
            if rhs is None:
                return il.IfPr(lhs, p.op, self.check(p.rhs, lhs.typ), p.span)
            if lhs.typ == rhs.typ:
                return il.IfPr(lhs, p.op, rhs, p.span)
            r2 = self.coerce(rhs, lhs.typ, p.span)
            if r2 is not None:
                return il.IfPr(lhs, p.op, r2, p.span)
            l2 = self.coerce(lhs, rhs.typ, p.span)
            if l2 is not None:
                return il.IfPr(l2, p.op, rhs, p.span)
            self.fail("E-TYPE", f"cannot compare {lhs.typ} with {rhs.typ}", p.span)
        lhs = self.infer(p.lhs)
        rhs = self.infer(p.rhs)
        if lhs is None or rhs is None or not _ordered(lhs.typ) or lhs.typ != rhs.typ:
            t = lhs.typ if lhs is not None else rhs.typ if rhs is not None else None
            if t is not None and _ordered(t):
                lhs = self.check(p.lhs, t)
                rhs = self.check(p.rhs, t)
            else:
                self.fail("E-TYPE", f"operator {p.op} needs numeric operands", p.span)
        return il.IfPr(lhs, p.op, rhs, p.span)

    def _premises(self, prems) -> tuple:
        out = []
        for p in prems:
            try:
                out.append(self.premise(p))
            except _Abort:
                pass
        return tuple(out)

    def _unused(self, occ: dict, prems):
        for p in prems:
            if isinstance(p, el.IfPremise) and p.op == "=":
                for side in (p.lhs, p.rhs):
                    core = side.body if isinstance(side, el.IterE) else side
                    if isinstance(core, el.VarE) and len(occ.get(core.full, ())) == 1:
                        self.warning("W-UNUSED", f"variable {core.full} is bound but never used",
                                     core.span)

    # -- definitions ----------------------------------------------------

    def _func_clause(self, d: el.FuncClause):
        f = self.out.func_table.get(d.name)
        if f is None:
            self.fail("E-UNDEF", f"clause for undeclared function ${d.name}", d.span)
        if len(d.pattern_args) != len(f.param_types):
            self.fail("E-ARITY", f"function ${d.name} expects {len(f.param_types)} "
                      f"argument(s), got {len(d.pattern_args)}", d.span)
        occ = self.setup_vars(list(d.pattern_args) + [d.result_expr] + list(d.premises))
        args = []
        for a, t in zip(d.pattern_args, f.param_types):
            try:
                args.append(self.check(a, t))
            except _Abort:
                pass
        result = self.check(d.result_expr, f.result_type)
        prems = self._premises(d.premises)
        self._unused(occ, d.premises)
        bound = {n: self.full_var_type(n) for n in self.mult if n in self.var_base}
        f.clauses.append(il.IlClause(tuple(args), result, prems, bound, d.span))

    def _rule(self, d: el.RuleDef):
        rel = self.out.relation_table.get(d.relation_name)
        if rel is None:
            self.fail("E-UNDEF", f"rule for undeclared relation {d.relation_name}", d.span)
        if d.kind != rel.kind:
            self.fail("E-TYPE", f"relation {rel.name} is not of form {d.kind}", d.span)
        seen = self.rule_ids.setdefault(rel.name, set())
        if d.rule_id in seen:
            self.error("E-DUP", f"rule {d.relation_name}/{d.rule_id} is defined twice", d.span)
        seen.add(d.rule_id)
        if (d.lhs_state is None) != (rel.lhs_state is None) or \
                (d.rhs_state is None) != (rel.rhs_state is None):
            self.fail("E-TYPE", f"state components do not match relation {rel.name}", d.span)
        occ = self.setup_vars([d.lhs_state, d.lhs, d.rhs_state, d.rhs] + list(d.premises))
        sides = []
        for e, t in ((d.lhs_state, rel.lhs_state), (d.lhs, rel.lhs),
                     (d.rhs_state, rel.rhs_state), (d.rhs, rel.rhs)):
            if e is None:
                sides.append(None)
                continue
            try:
                sides.append(self.check(e, t))
            except _Abort:
                sides.append(None)
        prems = self._premises(d.premises)
        self._unused(occ, d.premises)
        else_count = sum(isinstance(p, el.ElsePremise) for p in d.premises)
        if else_count and len(d.premises) != 1:
            self.error("E-TYPE", "'otherwise' must be the only premise of a rule", d.span)
        if any(s is None for s, e in zip(sides, (d.lhs_state, d.lhs, d.rhs_state, d.rhs))
               if e is not None):
            return
        bound = {n: self.full_var_type(n) for n in self.mult if n in self.var_base}
        rel.rules.append(il.IlRule(d.relation_name, d.rule_id, sides[0], sides[1], sides[2],
                                   sides[3], prems, bound, d.kind, d.span))


def _mult_str(depth: tuple) -> str:
    if not depth:
        return "scalar"
    return "".join("*" if k == "list" else "?" for k in depth)


def _iter_depth(t) -> int:
    n = 0
    while isinstance(t, IterT):
        n += 1
        t = t.base
    return n


def _core(t):
    while isinstance(t, IterT):
        t = t.base
    return t


def _ordered(t) -> bool:
    return isinstance(t, PrimT) and t.name != "bool"


def elaborate_with_diagnostics(script: el.ElScript) -> tuple[il.IlScript, list[Diagnostic]]:
    e = Elaborator()
    out = e.run(script)
    return out, sorted(e.diags, key=Diagnostic.sort_key)


def elaborate(script: el.ElScript) -> il.IlScript:
    """Elaborate ``script``; raises SpecError carrying every error diagnostic."""
    out, diags = elaborate_with_diagnostics(script)
    if any(d.is_error for d in diags):
        raise SpecError(diags)
    return out


def infer_multiplicity(expr, env: dict, script: il.IlScript) -> il.IlType:
    """Type of EL ``expr`` given declared scalar types ``env`` for its variables."""
    e = Elaborator()
    e.out = script
    e.syntax_names = {n: s.span for n, s in script.syntax_table.items()}
    e._build_subtyping()
    e.setup_vars([expr], extra_types=env)
    errors = [d for d in e.diags if d.is_error]
    if errors:
        raise SpecError(errors)
    try:
        r = e.infer(expr)
    except _Abort:
        raise SpecError([d for d in e.diags if d.is_error])
    if r is None:
        raise SpecError([Diagnostic("error", "E-TYPE", "type cannot be inferred", expr.span)])
    return r.typ
