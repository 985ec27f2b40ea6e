"""Deterministic EL printer whose output re-parses to an equal script."""

from __future__ import annotations

from . import ast as el


def _type(t: el.ElType) -> str:
    return t.name + (t.iter or "")


def _is_atomic(e) -> bool:
    if isinstance(e, el.ConstructE):
        return not e.args
    return not isinstance(e, (el.SeqE, el.BinE))


def atom(e) -> str:
    """Render ``e`` so that it parses back as a single atom."""
    text = exp(e)
    return text if _is_atomic(e) else f"({text})"


def _operand(e) -> str:
    """Like atom, but constructors are always parenthesised before a postfix."""
    return f"({exp(e)})" if isinstance(e, el.ConstructE) else atom(e)


def exp(e) -> str:
    if isinstance(e, el.VarE):
        return e.full
    if isinstance(e, el.NatE):
        return str(e.value)
    if isinstance(e, el.OptE):
        if e.payload is not None:
            raise ValueError("option payloads have no surface syntax")
        return "epsilon"
    if isinstance(e, el.ConstructE):
        if not e.args:
            return e.constructor
        return " ".join([e.constructor] + [atom(a) for a in e.args])
    if isinstance(e, el.CallE):
        return f"${e.function}(" + ", ".join(exp(a) for a in e.args) + ")"
    if isinstance(e, el.SeqE):
        # a bare constructor would take the next element as its argument
        last = len(e.elements) - 1
        return " ".join(f"({atom(x)})" if k < last and isinstance(x, el.ConstructE)
                        and not x.args else atom(x) for k, x in enumerate(e.elements))
    if isinstance(e, el.TupleE):
        return "(" + ", ".join(exp(a) for a in e.args) + ")"
    if isinstance(e, el.ListE):
        return "[" + ", ".join(exp(a) for a in e.elements) + "]"
    if isinstance(e, el.IterE):
        if e.iter == "^":
            return f"{_operand(e.body)}^{atom(e.count)}"
        return _operand(e.body) + e.iter
    if isinstance(e, el.LenE):
        inner = exp(e.arg)
        # a bar inside would close the length early
        return f"|({inner})|" if "|" in inner else f"|{inner}|"
    if isinstance(e, el.BinE):
        rhs = exp(e.rhs) if not isinstance(e.rhs, el.BinE) else f"({exp(e.rhs)})"
        return f"{exp(e.lhs)} {e.op} {rhs}"
    if isinstance(e, el.IdxE):
        return f"{_operand(e.arg)}[{exp(e.index)}]"
    raise TypeError(f"not an EL expression: {e!r}")


def _side(e) -> str:
    # top-level constructor applications keep their parentheses, as in (CONST nt c)
    return atom(e) if isinstance(e, el.ConstructE) else exp(e)


def premise(p) -> str:
    if isinstance(p, el.IfPremise):
        return f"if {_side(p.lhs)} {p.op} {_side(p.rhs)}"
    if isinstance(p, el.ElsePremise):
        return "otherwise"
    if isinstance(p, el.IterPremise):
        return f"({premise(p.body)}){p.iter}"
    raise TypeError(p)


def _premises(ps) -> str:
    return "".join(f"\n  -- {premise(p)}" for p in ps)


def _case(c: el.SyntaxCase) -> str:
    if c.constructor is None:
        return _type(c.args[0])
    return " ".join([c.constructor] + [_type(a) for a in c.args])


def definition(d) -> str:
    if isinstance(d, el.SyntaxDef):
        if d.cases is None:
            return f"syntax {d.name}"
        cases = [_case(c) for c in d.cases]
        one_line = f"syntax {d.name} = " + " | ".join(cases)
        if len(one_line) <= 78:
            return one_line
        return f"syntax {d.name} =\n" + "\n".join(f"  | {c}" for c in cases)
    if isinstance(d, el.VarDecl):
        return f"var {d.var_name} : {_type(d.type)}"
    if isinstance(d, el.FuncDecl):
        params = ", ".join(_type(t) for t in d.param_types)
        return f"def ${d.name}({params}) : {_type(d.result_type)}"
    if isinstance(d, el.FuncClause):
        args = ", ".join(exp(a) for a in d.pattern_args)
        return f"def ${d.name}({args}) = {_side(d.result_expr)}" + _premises(d.premises)
    if isinstance(d, el.RelationDecl):
        def tys(ts):
            return " ".join(_type(t) for t in ts)
        if d.kind == "|-":
            return f"relation {d.name}: |- {tys(d.lhs)} : {tys(d.rhs)}"
        lhs = (tys(d.lhs_state) + "; " if d.lhs_state else "") + tys(d.lhs)
        rhs = (tys(d.rhs_state) + "; " if d.rhs_state else "") + tys(d.rhs)
        return f"relation {d.name}: {lhs} ~> {rhs}"
    if isinstance(d, el.RuleDef):
        head = f"rule {d.relation_name}/{d.rule_id}:"
        if d.kind == "|-":
            body = f"|- {_side(d.lhs)} : {_side(d.rhs)}"
        else:
            lhs = (exp(d.lhs_state) + "; " if d.lhs_state is not None else "") + _side(d.lhs)
            rhs = (exp(d.rhs_state) + "; " if d.rhs_state is not None else "") + _side(d.rhs)
            body = f"{lhs} ~> {rhs}"
        return f"{head}\n  {body}" + _premises(d.premises)
    raise TypeError(d)


def pretty_el(script: el.ElScript) -> str:
    if not script.defs:
        return ""
    return "\n\n".join(definition(d) for d in script.defs) + "\n"
