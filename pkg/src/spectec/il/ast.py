"""Internal language: the fully typed form produced by elaboration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..diagnostics import SourceSpan, NO_SPAN

PRIM_TYPES = ("nat", "int_32", "int_64", "float_32", "float_64", "bool")


# -- types --------------------------------------------------------------

@dataclass(frozen=True)
class PrimT:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class SynT:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TupleT:
    types: tuple

    def __str__(self):
        return "(" + ", ".join(map(str, self.types)) + ")"


@dataclass(frozen=True)
class IterT:
    base: "IlType"
    iter: str  # "list" | "option"

    def __post_init__(self):
        if self.iter == "option" and isinstance(self.base, IterT) and self.base.iter == "option":
            raise ValueError("doubly optional type")

    def __str__(self):
        return f"{self.base}{'*' if self.iter == 'list' else '?'}"


IlType = Union[PrimT, SynT, TupleT, IterT]

NAT = PrimT("nat")
BOOL = PrimT("bool")


def list_of(t) -> IterT:
    return IterT(t, "list")


def opt_of(t) -> IterT:
    return IterT(t, "option")


# -- expressions --------------------------------------------------------

def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class VarE:
    name: str
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class NatE:
    value: int
    typ: IlType = NAT
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ConE:
    constructor: str
    args: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CallE:
    function: str
    args: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class TupleE:
    args: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ListE:
    """A list literal of scalar elements."""

    elements: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CatE:
    """Concatenation of list-typed parts (juxtaposed sequences)."""

    parts: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class OptE:
    payload: Optional["IlExp"]
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IterE:
    """``body*``, ``body?`` or ``body^count``; ``vars`` are the iterated variables."""

    body: "IlExp"
    iter: str  # "list" | "option"
    count: Optional["IlExp"]
    vars: tuple
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class LenE:
    arg: "IlExp"
    typ: IlType = NAT
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BinE:
    op: str
    lhs: "IlExp"
    rhs: "IlExp"
    typ: IlType = NAT
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IdxE:
    arg: "IlExp"
    index: "IlExp"
    typ: IlType
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CastE:
    """Explicit upcast of ``arg`` to ``typ`` (one injection level, or element-wise)."""

    arg: "IlExp"
    typ: IlType
    span: SourceSpan = _span()


IlExp = Union[VarE, NatE, ConE, CallE, TupleE, ListE, CatE, OptE, IterE, LenE, BinE, IdxE, CastE]


# -- premises -----------------------------------------------------------

@dataclass(frozen=True)
class IfPr:
    lhs: IlExp
    op: str
    rhs: IlExp
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ElsePr:
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IterPr:
    body: "IlPremise"
    iter: str
    vars: tuple
    span: SourceSpan = _span()


IlPremise = Union[IfPr, ElsePr, IterPr]


# -- definitions --------------------------------------------------------

@dataclass
class IlSyntax:
    name: str
    cases: Optional[list]  # list of (constructor or None, tuple of IlType); None = opaque
    span: SourceSpan = _span()

    def constructors(self):
        return [c for c, _ in (self.cases or []) if c is not None]

    def injections(self):
        return [ts[0] for c, ts in (self.cases or []) if c is None]


@dataclass
class IlClause:
    args: tuple
    result: IlExp
    premises: tuple
    bound_vars: dict
    span: SourceSpan = _span()


@dataclass
class IlFunc:
    name: str
    param_types: tuple
    result_type: IlType
    clauses: list = field(default_factory=list)
    span: SourceSpan = _span()

    @property
    def is_primitive(self) -> bool:
        return not self.clauses


@dataclass
class IlRule:
    relation_name: str
    rule_id: str
    lhs_state: Optional[IlExp]
    lhs: IlExp
    rhs_state: Optional[IlExp]
    rhs: IlExp
    premises: tuple
    bound_vars: dict
    kind: str = "~>"
    span: SourceSpan = _span()

    @property
    def qualified_id(self) -> str:
        return f"{self.relation_name}/{self.rule_id}"


@dataclass
class IlRelation:
    name: str
    kind: str
    lhs_state: Optional[IlType]
    lhs: IlType
    rhs_state: Optional[IlType]
    rhs: IlType
    rules: list = field(default_factory=list)
    span: SourceSpan = _span()


@dataclass
class RecGroup:
    names: tuple
    recursive: bool


@dataclass
class IlScript:
    syntax_table: dict = field(default_factory=dict)  # name -> IlSyntax
    func_table: dict = field(default_factory=dict)  # name -> IlFunc
    relation_table: dict = field(default_factory=dict)  # name -> IlRelation
    recursion_groups: list = field(default_factory=list)  # [RecGroup]
    constructors: dict = field(default_factory=dict)  # constructor -> (syntax name, arg types)
    var_types: dict = field(default_factory=dict)  # declared metavariable types
    order: list = field(default_factory=list)  # (kind, name) in source order

    def rules(self) -> list:
        return [r for rel in self.relation_table.values() for r in rel.rules]

    def is_empty(self) -> bool:
        return not (self.syntax_table or self.func_table or self.relation_table)


# -- traversal ----------------------------------------------------------

def children(e) -> list:
    if isinstance(e, (ConE, CallE, TupleE)):
        return list(e.args)
    if isinstance(e, ListE):
        return list(e.elements)
    if isinstance(e, CatE):
        return list(e.parts)
    if isinstance(e, OptE):
        return [] if e.payload is None else [e.payload]
    if isinstance(e, IterE):
        return [e.body] + ([e.count] if e.count is not None else [])
    if isinstance(e, (LenE, CastE)):
        return [e.arg]
    if isinstance(e, BinE):
        return [e.lhs, e.rhs]
    if isinstance(e, IdxE):
        return [e.arg, e.index]
    if isinstance(e, IfPr):
        return [e.lhs, e.rhs]
    if isinstance(e, IterPr):
        return [e.body]
    return []


def walk(e):
    yield e
    for c in children(e):
        yield from walk(c)


def free_vars(e) -> set:
    return {n.name for n in walk(e) if isinstance(n, VarE)}


def strip_casts(e):
    while isinstance(e, CastE):
        e = e.arg
    return e
