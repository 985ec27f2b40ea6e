"""Prose pseudocode from AL algorithms, as reStructuredText or plain text.

Every sentence comes from a fixed template per AL instruction or condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..al import ast as al

_CMP = {"is": "is", "ne": "is not", "lt": "is less than", "le": "is less than or equal to",
        "gt": "is greater than", "ge": "is greater than or equal to"}
_NEG = {"is": "ne", "ne": "is", "lt": "ge", "ge": "lt", "gt": "le", "le": "gt"}
_CONTEXT = {"LABEL_": "label", "FRAME_": "frame"}


def _roman(n: int) -> str:
    out = ""
    for value, digits in ((10, "x"), (9, "ix"), (5, "v"), (4, "iv"), (1, "i")):
        while n >= value:
            out += digits
            n -= value
    return out


def _marker(depth: int, n: int) -> str:
    kind = depth % 3
    if kind == 0:
        return f"{n}."
    if kind == 1:
        return f"{chr(ord('a') + (n - 1) % 26)}."
    return f"{_roman(n)}."


@dataclass
class Step:
    text: str
    children: list = field(default_factory=list)


@dataclass
class ProseDoc:
    """Step lists keyed by algorithm; ``anchors`` maps header to label."""

    sections: list = field(default_factory=list)  # [(anchor, title, [Step])]

    def rst(self) -> str:
        return "\n".join(_section_rst(a, t, s) for a, t, s in self.sections)

    def plain(self) -> str:
        return "\n".join(_section_plain(t, s) for _, t, s in self.sections)


class _Prose:
    def __init__(self, literal: bool):
        self.literal = literal  # wrap expressions as rst inline literals

    def code(self, text: str) -> str:
        return f"``{text}``" if self.literal else text

    # -- expressions (rendered as compact notation) ---------------------

    def notation(self, e) -> str:
        if isinstance(e, al.NameE):
            return e.name
        if isinstance(e, al.NumE):
            return str(e.value)
        if isinstance(e, al.ConstructE):
            head = e.constructor.lower().rstrip("_")
            if not e.args:
                return head
            return "(" + " ".join([head] + [self.notation(a) for a in e.args]) + ")"
        if isinstance(e, al.AppE):
            return f"${e.function}(" + ", ".join(self.notation(a) for a in e.args) + ")"
        if isinstance(e, al.ListE):
            return "[" + ", ".join(self.notation(x) for x in e.elements) + "]"
        if isinstance(e, al.CatE):
            return " ".join(self.notation(p) for p in e.parts)
        if isinstance(e, al.TupleE):
            return "(" + ", ".join(self.notation(a) for a in e.args) + ")"
        if isinstance(e, al.LengthE):
            return f"|{self.notation(e.arg)}|"
        if isinstance(e, al.IterE):
            body = self.notation(e.body)
            if not isinstance(e.body, (al.NameE, al.ConstructE, al.AppE)):
                body = f"({body})"
            if e.iter == "^":
                return f"{body}^{self.notation(e.count)}"
            return body + e.iter
        if isinstance(e, al.BinE):
            return f"{self.notation(e.lhs)} {e.op} {self.notation(e.rhs)}"
        if isinstance(e, al.IdxE):
            return f"{self.notation(e.arg)}[{self.notation(e.index)}]"
        if isinstance(e, al.OptSomeE):
            return self.notation(e.arg)
        if isinstance(e, al.OptNoneE):
            return "epsilon"
        if isinstance(e, al.CurrentContextE):
            return f"the current {_CONTEXT.get(e.constructor, e.constructor)}"
        if isinstance(e, al.CurrentStateE):
            return "the current state"
        raise TypeError(f"no prose for {e!r}")

    def exp(self, e) -> str:
        """An expression inside a sentence."""
        if isinstance(e, al.AppE):
            return f"the result of computing {self.code(self.notation(e))}"
        if isinstance(e, al.LengthE):
            return f"the length of {self.exp(e.arg)}"
        if isinstance(e, (al.CurrentContextE, al.CurrentStateE)):
            return self.notation(e)
        return self.code(self.notation(e))

    # -- conditions -----------------------------------------------------

    def cond(self, c) -> str:
        if isinstance(c, al.CompareC):
            if c.op in ("is", "ne") and isinstance(c.rhs, al.ListE) and not c.rhs.elements:
                return f"{self.exp(c.lhs)} is {'empty' if c.op == 'is' else 'not empty'}"
            return f"{self.exp(c.lhs)} {_CMP[c.op]} {self.exp(c.rhs)}"
        if isinstance(c, al.TopValueC):
            if c.type_expr is None:
                return "a value is on the top of the stack"
            return f"a value of number type {self.exp(c.type_expr)} is on the top of the stack"
        if isinstance(c, al.TopValuesC):
            return f"there are at least {self.exp(c.count)} values on the top of the stack"
        if isinstance(c, al.TopContextC):
            return f"the innermost context is a {_CONTEXT.get(c.constructor, c.constructor)}"
        if isinstance(c, al.IsDefinedC):
            return f"{self.exp(c.arg)} is defined"
        if isinstance(c, al.NotC):
            inner = c.cond
            if isinstance(inner, al.CompareC):
                return self.cond(al.CompareC(_NEG[inner.op], inner.lhs, inner.rhs))
            if isinstance(inner, al.TopContextC):
                return f"the innermost context is not a {_CONTEXT.get(inner.constructor, inner.constructor)}"
            return f"it is not the case that {self.cond(inner)}"
        if isinstance(c, al.AndC):
            return " and ".join(self.cond(x) for x in c.conds)
        raise TypeError(f"no prose for condition {c!r}")

    # -- instructions ---------------------------------------------------

    def steps(self, body) -> list:
        out: list = []
        for i in body:
            out.extend(self.instr(i))
        return out

    def instr(self, i) -> list:
        if isinstance(i, al.AssertI):
            return [Step(f"Assert: due to validation, {self.cond(i.cond)}.")]
        if isinstance(i, al.PopI):
            what = "values" if isinstance(i.pattern, al.IterE) else "value"
            return [Step(f"Pop the {what} {self.exp(i.pattern)} from the stack.")]
        if isinstance(i, al.PopAllI):
            return [Step(f"Pop all values {self.exp(i.pattern)} from the top of the stack.")]
        if isinstance(i, al.PushI):
            what = "values" if isinstance(i.expr, (al.IterE, al.CatE)) else "value"
            return [Step(f"Push the {what} {self.exp(i.expr)} to the stack.")]
        if isinstance(i, al.LetI):
            return [Step(f"Let {self.code(self.notation(i.pattern))} be {self.exp(i.expr)}.")]
        if isinstance(i, al.IfI):
            out = [Step(f"If {self.cond(i.cond)}, then:", self.steps(i.then_body))]
            rest = list(i.else_body)
            while len(rest) == 1 and isinstance(rest[0], al.IfI):
                nested = rest[0]
                out.append(Step(f"Else, if {self.cond(nested.cond)}, then:",
                                self.steps(nested.then_body)))
                rest = list(nested.else_body)
            if rest:
                out.append(Step("Else:", self.steps(rest)))
            return out
        if isinstance(i, al.TrapI):
            return [Step("Trap.")]
        if isinstance(i, al.ReturnI):
            if i.expr is None:
                return [Step("Return.")]
            return [Step(f"Return {self.exp(i.expr)}.")]
        if isinstance(i, al.ExecuteI):
            if isinstance(i.expr, (al.IterE, al.ListE, al.CatE)):
                return [Step(f"Execute the sequence {self.exp(i.expr)}.")]
            return [Step(f"Execute the instruction {self.exp(i.expr)}.")]
        if isinstance(i, al.ExitI):
            return [Step(f"Exit from the current {_CONTEXT.get(i.constructor, i.constructor)}.")]
        if isinstance(i, al.PerformI):
            return [Step(f"Perform {self.code(self.notation(i.expr))}.")]
        if isinstance(i, al.NopI):
            return [Step("Do nothing.")]
        raise TypeError(f"no prose for {i!r}")


def title(alg: al.AlAlgorithm) -> str:
    p = _Prose(False)
    if alg.kind == "func":
        return f"{alg.instruction_name}(" + ", ".join(p.notation(x) for x in alg.params) + ")"
    return " ".join([alg.instruction_name.lower().rstrip("_")] + [p.notation(x) for x in alg.params])


def anchor(alg: al.AlAlgorithm) -> str:
    kind = "func" if alg.kind == "func" else "exec"
    return f"def-{kind}-" + alg.instruction_name.lstrip("$").lower().replace("_", "-").strip("-")


def render_prose(alg: al.AlAlgorithm, rst: bool = True) -> ProseDoc:
    """One algorithm as a ProseDoc fragment."""
    return ProseDoc([(anchor(alg), title(alg), _Prose(rst).steps(alg.body))])


def render_all(algorithms, rst: bool = True) -> ProseDoc:
    doc = ProseDoc()
    for a in algorithms:
        doc.sections.extend(render_prose(a, rst).sections)
    return doc


# -- layout -----------------------------------------------------------------

def _lines(steps, depth: int, indent: str, rst: bool) -> list:
    out: list = []
    for n, s in enumerate(steps, 1):
        mark = _marker(depth, n)
        out.append(f"{indent}{mark} {s.text}")
        if s.children:
            inner = indent + " " * (len(mark) + 1)
            if rst:
                out.append("")
            out.extend(_lines(s.children, depth + 1, inner, rst))
            if rst:
                out.append("")
    return out


def _squash(lines: list) -> list:
    out: list = []
    for line in lines:
        if line == "" and out and out[-1] == "":
            continue
        out.append(line)
    while out and out[-1] == "":
        out.pop()
    return out


def _section_rst(anchor_: str, heading: str, steps) -> str:
    head = [f".. _{anchor_}:", "", heading, "~" * len(heading), ""]
    body = _squash(_lines(steps, 0, "", True))
    return "\n".join(head + body) + "\n"


def _section_plain(heading: str, steps) -> str:
    return "\n".join([heading] + _lines(steps, 0, "  ", False)) + "\n"


def step_numbers(steps, depth: int = 0) -> list:
    """Marker sequences per level, for contiguity checks."""
    out = [[_marker(depth, n) for n in range(1, len(steps) + 1)]]
    for s in steps:
        if s.children:
            out.extend(step_numbers(s.children, depth + 1))
    return out
