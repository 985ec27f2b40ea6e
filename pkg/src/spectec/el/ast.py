"""External language: the span-annotated syntax tree of DSL source.

Spans are excluded from equality so that two parses of equivalent text
compare equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..diagnostics import SourceSpan, NO_SPAN


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- types --------------------------------------------------------------

@dataclass
class ElType:
    """A type reference such as ``instr*`` or ``numtype?``."""

    name: str
    iter: Optional[str] = None  # None | "*" | "?"
    span: SourceSpan = _span()


# -- expressions --------------------------------------------------------

@dataclass
class VarE:
    name: str
    subscript: Optional[str] = None
    span: SourceSpan = _span()

    @property
    def full(self) -> str:
        return self.name if self.subscript is None else f"{self.name}_{self.subscript}"


@dataclass
class NatE:
    value: int
    span: SourceSpan = _span()


@dataclass
class ConstructE:
    constructor: str
    args: list["ElExp"]
    span: SourceSpan = _span()


@dataclass
class CallE:
    function: str  # without the leading "$"
    args: list["ElExp"]
    span: SourceSpan = _span()


@dataclass
class SeqE:
    elements: list["ElExp"]
    span: SourceSpan = _span()


@dataclass
class TupleE:
    args: list["ElExp"]
    span: SourceSpan = _span()


@dataclass
class OptE:
    """``epsilon`` when ``payload`` is None."""

    payload: Optional["ElExp"] = None
    span: SourceSpan = _span()


@dataclass
class IterE:
    body: "ElExp"
    iter: str  # "*" | "?" | "^"
    count: Optional["ElExp"] = None  # only for "^"
    span: SourceSpan = _span()


@dataclass
class ListE:
    elements: list["ElExp"]
    span: SourceSpan = _span()


@dataclass
class LenE:
    arg: "ElExp"
    span: SourceSpan = _span()


@dataclass
class BinE:
    op: str  # "+" | "-"
    lhs: "ElExp"
    rhs: "ElExp"
    span: SourceSpan = _span()


@dataclass
class IdxE:
    arg: "ElExp"
    index: "ElExp"
    span: SourceSpan = _span()


ElExp = Union[VarE, NatE, ConstructE, CallE, SeqE, TupleE, OptE, IterE, ListE, LenE, BinE, IdxE]


# -- premises -----------------------------------------------------------

CMP_OPS = ("=", "=/=", "<", "<=", ">", ">=")


@dataclass
class IfPremise:
    lhs: ElExp
    op: str
    rhs: ElExp
    span: SourceSpan = _span()


@dataclass
class ElsePremise:
    span: SourceSpan = _span()


@dataclass
class IterPremise:
    body: "ElPremise"
    iter: str
    span: SourceSpan = _span()


ElPremise = Union[IfPremise, ElsePremise, IterPremise]


# -- definitions --------------------------------------------------------

@dataclass
class SyntaxCase:
    """``CON t1 t2`` when ``constructor`` is set, else an injected type ``t``."""

    constructor: Optional[str]
    args: list[ElType]
    span: SourceSpan = _span()


@dataclass
class SyntaxDef:
    name: str
    cases: Optional[list[SyntaxCase]]  # None: opaque type supplied by the runtime
    span: SourceSpan = _span()


@dataclass
class VarDecl:
    var_name: str
    type: ElType
    span: SourceSpan = _span()


@dataclass
class FuncDecl:
    name: str
    param_types: list[ElType]
    result_type: ElType
    span: SourceSpan = _span()


@dataclass
class FuncClause:
    name: str
    pattern_args: list[ElExp]
    result_expr: ElExp
    premises: list[ElPremise]
    span: SourceSpan = _span()


@dataclass
class RelationDecl:
    """``kind`` is "~>" (reduction) or "|-" (typing).

    Reduction shapes are ``[state ;] lhs ~> [state ;] rhs``; typing shapes are
    ``|- lhs : rhs``.
    """

    name: str
    kind: str
    lhs_state: Optional[list[ElType]]
    lhs: list[ElType]
    rhs_state: Optional[list[ElType]]
    rhs: list[ElType]
    span: SourceSpan = _span()


@dataclass
class RuleDef:
    relation_name: str
    rule_id: str
    lhs_state: Optional[ElExp]
    lhs: ElExp
    rhs_state: Optional[ElExp]
    rhs: ElExp
    premises: list[ElPremise]
    kind: str = "~>"
    span: SourceSpan = _span()


ElDef = Union[SyntaxDef, VarDecl, FuncDecl, FuncClause, RelationDecl, RuleDef]


@dataclass
class ElScript:
    defs: list[ElDef] = field(default_factory=list)

    def __add__(self, other: "ElScript") -> "ElScript":
        return ElScript(self.defs + other.defs)

    def rules(self) -> list[RuleDef]:
        return [d for d in self.defs if isinstance(d, RuleDef)]


def children(node) -> list:
    """Direct sub-nodes of an EL expression or premise."""
    if isinstance(node, (ConstructE, CallE)):
        return list(node.args)
    if isinstance(node, (SeqE, ListE)):
        return list(node.elements)
    if isinstance(node, TupleE):
        return list(node.args)
    if isinstance(node, OptE):
        return [] if node.payload is None else [node.payload]
    if isinstance(node, IterE):
        return [node.body] + ([node.count] if node.count is not None else [])
    if isinstance(node, LenE):
        return [node.arg]
    if isinstance(node, BinE):
        return [node.lhs, node.rhs]
    if isinstance(node, IdxE):
        return [node.arg, node.index]
    if isinstance(node, IfPremise):
        return [node.lhs, node.rhs]
    if isinstance(node, IterPremise):
        return [node.body]
    return []


def walk(node):
    yield node
    for c in children(node):
        yield from walk(c)


def free_vars(node) -> set[str]:
    return {n.full for n in walk(node) if isinstance(n, VarE)}
