"""LaTeX rendering of EL definitions in the style of formal reduction rules."""

from __future__ import annotations

import json
import pathlib
import re
from dataclasses import dataclass, field
from typing import Optional

from ..diagnostics import Diagnostic
from ..el import ast as el
from ..il.elaborate import elaborate_with_diagnostics

SYMBOLS = pathlib.Path(__file__).with_name("symbols.json")

PREAMBLE = r"""\documentclass{article}
\usepackage[margin=2cm]{geometry}
\usepackage{amsmath}
\usepackage{amssymb}
\setlength{\parindent}{0pt}
"""


class RenderRefused(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__(f"refusing to render a script with {len(diagnostics)} error(s)")


@dataclass
class LatexDoc:
    preamble: str
    blocks: list = field(default_factory=list)  # [(definition key, latex)]
    anchors: dict = field(default_factory=dict)  # definition key -> label
    warnings: list = field(default_factory=list)  # [Diagnostic]

    def body(self) -> str:
        return "\n".join(text for _, text in self.blocks)

    def text(self) -> str:
        return (self.preamble + "\\begin{document}\n\n" + self.body()
                + ("\n" if self.blocks else "") + "\\end{document}\n")


def load_symbols(path: pathlib.Path = SYMBOLS) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def escape_text(s: str) -> str:
    return re.sub(r"([_#%&$])", r"\\\1", s)


def label(kind: str, name: str) -> str:
    return f"def-{kind}-" + re.sub(r"[^A-Za-z0-9_.:-]", "-", name)


class _Renderer:
    def __init__(self, symbols: dict):
        self.constructors = symbols.get("constructors", {})
        self.functions = symbols.get("functions", {})
        self.ops = symbols.get("operators", {})
        self.arrow = self.ops.get("~>", r"\hookrightarrow")
        self.vdash = self.ops.get("|-", r"\vdash")
        self.warnings: list = []
        self._warned: set = set()

    # -- atoms ----------------------------------------------------------

    def con(self, name: str, span) -> str:
        tex = self.constructors.get(name)
        if tex is None:
            if name not in self._warned:
                self._warned.add(name)
                self.warnings.append(Diagnostic(
                    "warning", "W-SYMBOL",
                    f"no symbol for constructor {name}; using typewriter font", span))
            return f"\\mathtt{{{escape_text(name.lower())}}}"
        return tex

    def func(self, name: str) -> str:
        return self.functions.get(name, f"\\mathrm{{{escape_text(name)}}}")

    @staticmethod
    def ident(name: str) -> str:
        body = escape_text(name)
        return body if len(name) == 1 else f"\\mathit{{{body}}}"

    def var(self, e: el.VarE) -> str:
        base = self.ident(e.name)
        return base if e.subscript is None else f"{base}_{{{escape_text(e.subscript)}}}"

    def type(self, t: el.ElType) -> str:
        base = self.ident(t.name)
        if t.iter == "*":
            return base + "^\\ast"
        if t.iter == "?":
            return base + "^?"
        return base

    # -- expressions ----------------------------------------------------

    def exp(self, e) -> str:
        if isinstance(e, el.VarE):
            return self.var(e)
        if isinstance(e, el.NatE):
            return str(e.value)
        if isinstance(e, el.ConstructE):
            head = self.con(e.constructor, e.span)
            if not e.args:
                return head
            return "(" + "~".join([head] + [self.exp(a) for a in e.args]) + ")"
        if isinstance(e, el.CallE):
            return self.func(e.function) + "(" + ", ".join(self.exp(a) for a in e.args) + ")"
        if isinstance(e, el.SeqE):
            if not e.elements:
                return self.ops.get("epsilon", "\\epsilon")
            return "~".join(self.exp(x) for x in e.elements)
        if isinstance(e, el.TupleE):
            return "(" + ", ".join(self.exp(a) for a in e.args) + ")"
        if isinstance(e, el.OptE):
            return self.ops.get("epsilon", "\\epsilon") if e.payload is None else self.exp(e.payload)
        if isinstance(e, el.IterE):
            body = self.exp(e.body)
            if not isinstance(e.body, (el.VarE, el.NatE, el.CallE, el.ConstructE, el.TupleE)):
                body = f"({body})"
            if e.iter == "^":
                return f"{{{body}}}^{{{self.exp(e.count)}}}"
            return f"{{{body}}}^{{{self.ops.get(e.iter, e.iter)}}}"
        if isinstance(e, el.ListE):
            return "[" + ", ".join(self.exp(x) for x in e.elements) + "]"
        if isinstance(e, el.LenE):
            return f"|{self.exp(e.arg)}|"
        if isinstance(e, el.BinE):
            return f"{self.exp(e.lhs)} {self.ops.get(e.op, e.op)} {self.exp(e.rhs)}"
        if isinstance(e, el.IdxE):
            return f"{self.exp(e.arg)}[{self.exp(e.index)}]"
        raise TypeError(f"cannot render {e!r}")

    def premise(self, p) -> str:
        if isinstance(p, el.IfPremise):
            return f"{self.exp(p.lhs)} {self.ops.get(p.op, p.op)} {self.exp(p.rhs)}"
        if isinstance(p, el.ElsePremise):
            return "\\mbox{otherwise}"
        if isinstance(p, el.IterPremise):
            return f"({self.premise(p.body)})^{{{self.ops.get(p.iter, p.iter)}}}"
        raise TypeError(f"cannot render premise {p!r}")

    def _side(self, state, e) -> str:
        body = self.exp(e)
        return body if state is None else f"{self.exp(state)};~{body}"

    # -- definitions ----------------------------------------------------

    def syntax(self, d: el.SyntaxDef) -> str:
        name = self.ident(d.name)
        if d.cases is None:
            rows = [(name, "\\ldots")]
        else:
            alts: list = []
            nullary: list = []
            for c in d.cases:
                if c.constructor is None:
                    nullary.append(self.type(c.args[0]))
                elif not c.args:
                    nullary.append(self.con(c.constructor, c.span))
                else:
                    if nullary:
                        alts.append(" ~|~ ".join(nullary))
                        nullary = []
                    alts.append("~".join([self.con(c.constructor, c.span)]
                                         + [self.type(t) for t in c.args]))
            if nullary:
                for i in range(0, len(nullary), 8):
                    alts.append(" ~|~ ".join(nullary[i:i + 8]))
            rows = [(name if i == 0 else "", alt) for i, alt in enumerate(alts)]
        lines = []
        for i, (lhs, rhs) in enumerate(rows):
            sep = "::=" if i == 0 else "|"
            lines.append(f"{lhs} & {sep} & {rhs} \\\\")
        return _array("@{}l@{~}r@{~}l@{}", lines)

    def var_decl(self, d: el.VarDecl) -> str:
        return f"${self.ident(d.var_name)} : {self.type(d.type)}$"

    def func_decl(self, d: el.FuncDecl, clauses: list) -> str:
        params = " \\times ".join(self.type(t) for t in d.param_types) or "()"
        lines = [f"{self.func(d.name)} & : & {params} \\rightarrow {self.type(d.result_type)} \\\\"]
        for c in clauses:
            lhs = self.func(c.name) + "(" + ", ".join(self.exp(a) for a in c.pattern_args) + ")"
            lines.append(f"{lhs} & = & {self.exp(c.result_expr)} \\\\")
            for p in c.premises:
                lines.append(f"& & \\quad \\mbox{{if}}~{self.premise(p)} \\\\")
        return _array("@{}l@{~}c@{~}l@{}", lines)

    def relation(self, d: el.RelationDecl) -> str:
        def side(state, types):
            body = "~".join(self.type(t) for t in types)
            return body if state is None else "~".join(self.type(t) for t in state) + ";~" + body
        name = f"\\mbox{{\\textsc{{{escape_text(d.name)}}}}}"
        if d.kind == "|-":
            sig = f"{self.vdash} {side(None, d.lhs)} : {side(None, d.rhs)}"
        else:
            sig = f"{side(d.lhs_state, d.lhs)} {self.arrow} " \
                  f"{side(d.rhs_state, d.rhs)}"
        return f"${name} : {sig}$"

    def rule(self, r: el.RuleDef) -> str:
        prefix = "T" if r.kind == "|-" else "E"
        tag = f"\\mbox{{\\textsc{{[{prefix}-{escape_text(r.rule_id)}]}}}}"
        if r.kind == "|-":
            lines = [f"{tag} & & {self.vdash} & {self.exp(r.lhs)} : {self.exp(r.rhs)} \\\\"]
        else:
            lines = [f"{tag} & {self._side(r.lhs_state, r.lhs)} & "
                     f"{self.arrow} & {self._side(r.rhs_state, r.rhs)} \\\\"]
        for p in r.premises:
            lines.append(f"& \\multicolumn{{3}}{{l}}{{\\quad \\mbox{{if}}~{self.premise(p)}}} \\\\")
        return _array("@{}l@{\\quad}r@{~}c@{~}l@{}", lines)


def _array(cols: str, lines: list) -> str:
    return "$\\begin{array}{" + cols + "}\n" + "\n".join(lines) + "\n\\end{array}$"


def _block(anchor: str, comment: str, content: str) -> str:
    return f"% {comment}\n\\label{{{anchor}}}%\n{content}\n\\par\\medskip\n"


def render_checked(script: el.ElScript, symbols: Optional[dict] = None) -> LatexDoc:
    """Render without re-checking; the caller guarantees ``script`` elaborates."""
    r = _Renderer(symbols if symbols is not None else load_symbols())
    doc = LatexDoc(PREAMBLE)
    clauses: dict = {}
    for d in script.defs:
        if isinstance(d, el.FuncClause):
            clauses.setdefault(d.name, []).append(d)
    seen_funcs: set = set()
    for d in script.defs:
        if isinstance(d, el.SyntaxDef):
            key, comment, content = ("syntax", d.name), f"syntax {d.name}", r.syntax(d)
        elif isinstance(d, el.VarDecl):
            key, comment, content = ("var", d.var_name), f"var {d.var_name}", r.var_decl(d)
        elif isinstance(d, el.FuncDecl):
            seen_funcs.add(d.name)
            key, comment = ("func", d.name), f"def ${d.name}"
            content = r.func_decl(d, clauses.get(d.name, []))
        elif isinstance(d, el.FuncClause):
            continue  # rendered with its declaration
        elif isinstance(d, el.RelationDecl):
            key, comment, content = ("relation", d.name), f"relation {d.name}", r.relation(d)
        elif isinstance(d, el.RuleDef):
            name = f"{d.relation_name}/{d.rule_id}"
            key, comment, content = ("rule", name), f"rule {name}", r.rule(d)
        else:
            continue
        anchor = label(*key)
        doc.anchors[key] = anchor
        doc.blocks.append((key, _block(anchor, comment, content)))
    doc.warnings = r.warnings
    return doc


def render_latex(script: el.ElScript, symbols: Optional[dict] = None) -> LatexDoc:
    """Render an EL script; raises RenderRefused if it does not elaborate cleanly."""
    _, diags = elaborate_with_diagnostics(script)
    errors = [d for d in diags if d.is_error]
    if errors:
        raise RenderRefused(errors)
    return render_checked(script, symbols)


def check_balanced(tex: str) -> list:
    """Mechanical well-formedness check: braces and \\begin/\\end pairs."""
    problems = []
    depth = 0
    envs: list = []
    stripped = re.sub(r"\\[{}%$&#_]", "", tex)
    stripped = re.sub(r"(?m)%.*$", "", stripped)
    for m in re.finditer(r"\\(begin|end)\{([^}]*)\}|[{}]", stripped):
        tok = m.group(0)
        if tok == "{":
            depth += 1
        elif tok == "}":
            depth -= 1
            if depth < 0:
                problems.append(f"unbalanced '}}' at offset {m.start()}")
                depth = 0
        if m.group(1) == "begin":
            envs.append(m.group(2))
        elif m.group(1) == "end":
            if not envs or envs[-1] != m.group(2):
                problems.append(f"\\end{{{m.group(2)}}} does not match an open environment")
            else:
                envs.pop()
    if depth:
        problems.append(f"{depth} unclosed '{{'")
    problems.extend(f"environment {e} not closed" for e in envs)
    dollars = len(re.findall(r"(?<!\\)\$", re.sub(r"(?m)%.*$", "", tex)))
    if dollars % 2:
        problems.append("unbalanced '$'")
    return problems
