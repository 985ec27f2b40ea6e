"""Constructor-syntax serialization of AL algorithms.

Long expressions are wrapped with continuation items aligned under the first
item of the innermost open bracket.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast as al

WIDTH = 80


@dataclass(frozen=True)
class _Group:
    head: str  # including the opening bracket
    items: tuple
    close: str


def _list(items) -> _Group:
    return _Group("[", tuple(doc(i) for i in items), "]")


def _call(name: str, *items) -> _Group:
    return _Group(name + "(", tuple(items), ")")


def doc(n):
    """Build the layout tree for an expression, condition or instruction."""
    if isinstance(n, al.NameE):
        return f"NameE({n.name})"
    if isinstance(n, al.NumE):
        return str(n.value)
    if isinstance(n, al.AppE):
        return _call("AppE", n.function, _list(n.args))
    if isinstance(n, al.ListE):
        return _call("ListE", _list(n.elements))
    if isinstance(n, al.CatE):
        return _call("CatE", _list(n.parts))
    if isinstance(n, al.ConstructE):
        return _call("ConstructE", n.constructor, _list(n.args))
    if isinstance(n, al.TupleE):
        return _call("TupleE", _list(n.args))
    if isinstance(n, al.LengthE):
        return _call("LengthE", doc(n.arg))
    if isinstance(n, al.IterE):
        if n.iter == "^":
            return _call("IterE", doc(n.body), _Group("^", (doc(n.count),), ""))
        return _call("IterE", doc(n.body), n.iter)
    if isinstance(n, al.BinE):
        return _call("BinE", n.op, doc(n.lhs), doc(n.rhs))
    if isinstance(n, al.IdxE):
        return _call("IdxE", doc(n.arg), doc(n.index))
    if isinstance(n, al.OptSomeE):
        return _call("OptSomeE", doc(n.arg))
    if isinstance(n, al.OptNoneE):
        return "OptNoneE"
    if isinstance(n, al.CurrentContextE):
        return f"CurrentContextE({n.constructor})"
    if isinstance(n, al.CurrentStateE):
        return "CurrentStateE"
    if isinstance(n, al.CompareC):
        return _call("CompareC", n.op, doc(n.lhs), doc(n.rhs))
    if isinstance(n, al.TopValueC):
        return "TopValueC()" if n.type_expr is None else _call("TopValueC", doc(n.type_expr))
    if isinstance(n, al.TopValuesC):
        return _call("TopValuesC", doc(n.count))
    if isinstance(n, al.TopContextC):
        return f"TopContextC({n.constructor})"
    if isinstance(n, al.IsDefinedC):
        return _call("IsDefinedC", doc(n.arg))
    if isinstance(n, al.NotC):
        return _call("NotC", doc(n.cond))
    if isinstance(n, al.AndC):
        return _call("AndC", _list(n.conds))
    if isinstance(n, al.AssertI):
        return _call("AssertI", doc(n.cond))
    if isinstance(n, al.PopI):
        return _call("PopI", doc(n.pattern))
    if isinstance(n, al.PopAllI):
        return _call("PopAllI", doc(n.pattern))
    if isinstance(n, al.PushI):
        return _call("PushI", doc(n.expr))
    if isinstance(n, al.LetI):
        return _call("LetI", doc(n.pattern), doc(n.expr))
    if isinstance(n, al.TrapI):
        return "TrapI"
    if isinstance(n, al.NopI):
        return "NopI"
    if isinstance(n, al.ReturnI):
        return "ReturnI" if n.expr is None else _call("ReturnI", doc(n.expr))
    if isinstance(n, al.ExecuteI):
        return _call("ExecuteI", doc(n.expr))
    if isinstance(n, al.ExitI):
        return f"ExitI({n.constructor})"
    if isinstance(n, al.PerformI):
        return _call("PerformI", doc(n.expr))
    raise TypeError(f"not an AL node: {n!r}")


def flat(d) -> str:
    if isinstance(d, str):
        return d
    return d.head + ", ".join(flat(i) for i in d.items) + d.close


def layout(d, col: int, width: int = WIDTH, trail: int = 0) -> str:
    """Render ``d`` starting at column ``col``; ``trail`` reserves room for closers."""
    text = flat(d)
    if isinstance(d, str) or col + len(text) + trail <= width:
        return text
    out = d.head
    start = col + len(d.head)
    cur = start
    n = len(d.items)
    for i, item in enumerate(d.items):
        last = i == n - 1
        extra = (len(d.close) + trail) if last else 1
        piece = flat(item)
        sep = "" if i == 0 else ", "
        if i > 0 and cur + len(sep) + len(piece) + extra > width:
            out += ",\n" + " " * start
            cur = start
            sep = ""
        out += sep
        cur += len(sep)
        rendered = layout(item, cur, width, extra)
        out += rendered
        cur = (cur + len(rendered)) if "\n" not in rendered else len(rendered.rsplit("\n", 1)[1])
    return out + d.close


def _instr_lines(i, indent: int, trail: str = "") -> list[str]:
    pad = " " * indent
    if isinstance(i, al.IfI):
        lines = [pad + "IfI("]
        cond = layout(doc(i.cond), indent + 2, trail=1)
        lines.extend((" " * (indent + 2) + cond + ",").split("\n"))
        lines.extend(_body_lines(i.then_body, indent + 2, ","))
        lines.extend(_body_lines(i.else_body, indent + 2, ")" + trail))
        return lines
    text = layout(doc(i), indent, trail=len(trail))
    return (pad + text + trail).split("\n")


def _body_lines(body, indent: int, trail: str) -> list[str]:
    pad = " " * indent
    if not body:
        return [pad + "[]" + trail]
    lines: list[str] = []
    for k, instr in enumerate(body):
        closing = "]" + trail if k == len(body) - 1 else ""
        sub = _instr_lines(instr, indent + 1, closing)
        if k == 0:
            sub[0] = pad + "[" + sub[0][indent + 1:]
        lines.extend(sub)
    return lines


def dump_algorithm(alg: al.AlAlgorithm) -> str:
    params = "".join(" " + flat(doc(p)) for p in alg.params)
    lines = [f"{alg.header}{params}:"]
    for i in alg.body:
        lines.extend(_instr_lines(i, 2))
    return "\n".join(lines) + "\n"


def dump_algorithms(algs) -> str:
    return "\n".join(dump_algorithm(a) for a in algs)


def skeleton(body) -> list:
    """Instruction kinds only, nested for IfI: the comparison key for golden shapes."""
    out = []
    for i in body:
        if isinstance(i, al.IfI):
            out.append(("IfI", skeleton(i.then_body), skeleton(i.else_body)))
        else:
            out.append(type(i).__name__)
    return out
