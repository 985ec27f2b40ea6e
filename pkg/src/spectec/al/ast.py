"""Algorithmic language: per-instruction imperative algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


# -- expressions --------------------------------------------------------

@dataclass(frozen=True)
class NameE:
    name: str


@dataclass(frozen=True)
class NumE:
    value: int


@dataclass(frozen=True)
class AppE:
    function: str
    args: tuple


@dataclass(frozen=True)
class ListE:
    elements: tuple


@dataclass(frozen=True)
class CatE:
    parts: tuple


@dataclass(frozen=True)
class ConstructE:
    constructor: str
    args: tuple


@dataclass(frozen=True)
class TupleE:
    args: tuple


@dataclass(frozen=True)
class LengthE:
    arg: "AlExpr"


@dataclass(frozen=True)
class IterE:
    """``body*`` (count None), ``body?`` or ``body^count`` over the listed names."""

    body: "AlExpr"
    iter: str  # "*" | "?" | "^"
    count: Optional["AlExpr"] = None
    names: tuple = ()


@dataclass(frozen=True)
class BinE:
    op: str
    lhs: "AlExpr"
    rhs: "AlExpr"


@dataclass(frozen=True)
class IdxE:
    arg: "AlExpr"
    index: "AlExpr"


@dataclass(frozen=True)
class OptSomeE:
    arg: "AlExpr"


@dataclass(frozen=True)
class OptNoneE:
    pass


@dataclass(frozen=True)
class CurrentContextE:
    """The innermost label or frame, without its body."""

    constructor: str


@dataclass(frozen=True)
class CurrentStateE:
    pass


AlExpr = Union[NameE, NumE, AppE, ListE, CatE, ConstructE, TupleE, LengthE, IterE, BinE, IdxE,
               OptSomeE, OptNoneE, CurrentContextE, CurrentStateE]


# -- conditions ---------------------------------------------------------

@dataclass(frozen=True)
class CompareC:
    op: str  # is, ne, lt, le, gt, ge
    lhs: AlExpr
    rhs: AlExpr


@dataclass(frozen=True)
class TopValueC:
    type_expr: Optional[AlExpr] = None


@dataclass(frozen=True)
class TopValuesC:
    count: AlExpr


@dataclass(frozen=True)
class TopContextC:
    constructor: str


@dataclass(frozen=True)
class IsDefinedC:
    arg: AlExpr


@dataclass(frozen=True)
class NotC:
    cond: "AlCond"


@dataclass(frozen=True)
class AndC:
    conds: tuple


AlCond = Union[CompareC, TopValueC, TopValuesC, TopContextC, IsDefinedC, NotC, AndC]


# -- instructions -------------------------------------------------------

@dataclass(frozen=True)
class AssertI:
    cond: AlCond


@dataclass(frozen=True)
class PopI:
    pattern: AlExpr


@dataclass(frozen=True)
class PopAllI:
    """Pop every value above the innermost context."""

    pattern: AlExpr


@dataclass(frozen=True)
class PushI:
    expr: AlExpr


@dataclass(frozen=True)
class LetI:
    pattern: AlExpr
    expr: AlExpr


@dataclass(frozen=True)
class IfI:
    cond: AlCond
    then_body: tuple
    else_body: tuple = ()


@dataclass(frozen=True)
class TrapI:
    pass


@dataclass(frozen=True)
class ReturnI:
    expr: Optional[AlExpr] = None


@dataclass(frozen=True)
class ExecuteI:
    expr: AlExpr


@dataclass(frozen=True)
class ExitI:
    """Leave the innermost context, dropping its remaining instructions."""

    constructor: str


@dataclass(frozen=True)
class PerformI:
    """Apply a state update computed by ``expr``."""

    expr: AlExpr


@dataclass(frozen=True)
class NopI:
    pass


AlInstr = Union[AssertI, PopI, PopAllI, PushI, LetI, IfI, TrapI, ReturnI, ExecuteI, ExitI,
                PerformI, NopI]


@dataclass
class AlAlgorithm:
    instruction_name: str
    params: tuple
    body: tuple
    kind: str = "instr"  # "instr" | "func"
    rule_ids: tuple = field(default=())

    @property
    def header(self) -> str:
        prefix = "execution_of_" if self.kind == "instr" else "function_"
        return prefix + self.instruction_name


# -- traversal ----------------------------------------------------------

def expr_children(e) -> list:
    if isinstance(e, (AppE, ConstructE, TupleE)):
        return list(e.args)
    if isinstance(e, ListE):
        return list(e.elements)
    if isinstance(e, CatE):
        return list(e.parts)
    if isinstance(e, (LengthE, OptSomeE)):
        return [e.arg]
    if isinstance(e, IterE):
        return [e.body] + ([e.count] if e.count is not None else [])
    if isinstance(e, BinE):
        return [e.lhs, e.rhs]
    if isinstance(e, IdxE):
        return [e.arg, e.index]
    if isinstance(e, CompareC):
        return [e.lhs, e.rhs]
    if isinstance(e, TopValueC):
        return [] if e.type_expr is None else [e.type_expr]
    if isinstance(e, TopValuesC):
        return [e.count]
    if isinstance(e, IsDefinedC):
        return [e.arg]
    if isinstance(e, NotC):
        return [e.cond]
    if isinstance(e, AndC):
        return list(e.conds)
    return []


def names_in(e) -> set:
    """Variable names read by an expression or condition."""
    if isinstance(e, NameE):
        return {e.name}
    out: set = set()
    for c in expr_children(e):
        out |= names_in(c)
    return out


def walk_instrs(body):
    for i in body:
        yield i
        if isinstance(i, IfI):
            yield from walk_instrs(i.then_body)
            yield from walk_instrs(i.else_body)
