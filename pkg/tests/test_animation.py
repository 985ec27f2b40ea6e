import itertools

import pytest

from conftest import check_golden
from spectec.al import ast as al
from spectec.al.animate import (AnimationError, CyclicDependency, animate, animate_rule_group,
                                binding_problems, guard_partiality, instruction_groups,
                                premise_dataflow)
from spectec.al.dump import dump_algorithm, dump_algorithms, skeleton
from spectec.corpus import CorpusManifest
from spectec.el.parser import parse_text
from spectec.il import ast as il
from spectec.il.elaborate import elaborate

PRELUDE = """\
syntax numtype = I32 | I64 | F32 | F64
syntax val = CONST numtype nat
syntax instr = val | NOP | DUP numtype | SPIN
var nt : numtype
var c : nat
var x : nat
relation Step_pure: instr* ~> instr*
def $f(nat) : nat
"""

BINOP_SKELETON = ["AssertI", "PopI", "AssertI", "PopI",
                  ("IfI", ["LetI", "PushI"], []), ("IfI", ["TrapI"], [])]

NAT = il.PrimT("nat")


def group(text: str, instr: str):
    script = elaborate(parse_text(PRELUDE + text))
    return animate_rule_group(instruction_groups(script)[instr], script)


def var(name):
    return il.VarE(name, NAT)


def call(*args):
    return il.CallE("f", tuple(args), NAT)


# -- animate_rule_group ------------------------------------------------------

def test_binop_matches_golden_dump(algorithms):
    alg = algorithms["BINOP"]
    check_golden("binop.al", dump_algorithm(alg))
    assert alg.rule_ids == ("Step_pure/binop-val", "Step_pure/binop-trap")


def test_binop_skeleton(algorithms):
    body = algorithms["BINOP"].body
    assert skeleton(body) == BINOP_SKELETON
    assert [p.pattern.args[1].name for p in body if isinstance(p, al.PopI)] == ["c_2", "c_1"]
    guard = body[4].cond
    assert isinstance(guard, al.CompareC) and guard.op == "is"
    assert isinstance(guard.lhs, al.LengthE) and guard.rhs == al.NumE(1)
    trap = body[5].cond
    assert trap.op == "is" and trap.rhs == al.ListE(())


def test_premise_free_rule_has_no_conditionals():
    alg = group("rule Step_pure/dup: (CONST nt c) (DUP nt) ~> (CONST nt c) (CONST nt c)", "DUP")
    assert skeleton(alg.body) == ["AssertI", "PopI", "PushI", "PushI"]


def test_cyclic_premise_is_an_animation_error():
    with pytest.raises(AnimationError) as e:
        group("rule Step_pure/spin: SPIN ~> (CONST I32 x)\n  -- if x = $f(x)\n", "SPIN")
    assert e.value.unresolvable_vars == {"x"}
    assert e.value.rule_id == "Step_pure/spin"
    assert e.value.span.line_start == 9


def test_every_algorithm_binds_before_use(algorithms):
    for alg in algorithms.values():
        assert binding_problems(alg) == [], alg.header


def test_terminators_end_their_branch(algorithms):
    def visit(body):
        for k, i in enumerate(body):
            if isinstance(i, (al.TrapI, al.ReturnI)):
                assert k == len(body) - 1
            if isinstance(i, al.IfI):
                visit(i.then_body)
                visit(i.else_body)
    for alg in algorithms.values():
        visit(alg.body)


def test_one_algorithm_per_instruction(pipeline):
    algs = [a for a in pipeline[1] if a.kind == "instr"]
    names = [a.instruction_name for a in algs]
    assert len(names) == len(set(names))
    assert set(names) == set(instruction_groups(pipeline[0]))


def test_covered_instructions_are_animated(pipeline):
    names = {a.instruction_name for a in pipeline[1] if a.kind == "instr"}
    assert set(CorpusManifest.load().covered) == names


def test_animation_is_deterministic(pipeline):
    assert dump_algorithms(animate(pipeline[0])) == dump_algorithms(pipeline[1])


# -- premise_dataflow --------------------------------------------------------

def test_binding_premise():
    p = il.IfPr(call(var("a")), "=", var("b"))
    assert premise_dataflow([p], {"a"}) == [(p, ("binds", frozenset({"b"})))]


def test_check_is_moved_after_its_binder():
    check = il.IfPr(var("b"), "=", il.NatE(3))
    bind = il.IfPr(call(var("a")), "=", var("b"))
    got = premise_dataflow([check, bind], {"a"})
    assert got == [(bind, ("binds", frozenset({"b"}))), (check, ("checks",))]
    # brute force over both permutations: only this order keeps every check fully bound
    valid = []
    for order in itertools.permutations([check, bind]):
        bound, ok = {"a"}, True
        for p in order:
            if p is check and "b" not in bound:
                ok = False
            bound |= {"b"} if p is bind else set()
        if ok:
            valid.append(order)
    assert valid == [(bind, check)]


def test_no_premises():
    assert premise_dataflow([], set()) == []


def test_source_order_is_kept_when_valid():
    p1 = il.IfPr(call(var("a")), "=", var("b"))
    p2 = il.IfPr(call(var("b")), "=", var("d"))
    p3 = il.IfPr(var("d"), "=", il.NatE(0))
    got = premise_dataflow([p1, p2, p3], {"a"})
    assert [p for p, _ in got] == [p1, p2, p3]


def test_unbindable_premises_raise():
    with pytest.raises(CyclicDependency) as e:
        premise_dataflow([il.IfPr(var("x"), "=", call(var("x")))], set())
    assert e.value.vars == {"x"}


# -- guard_partiality --------------------------------------------------------

APP = al.AppE("binop", (al.NameE("binop"), al.NameE("nt"), al.NameE("c_1"), al.NameE("c_2")))


def test_optional_binding_gets_length_one_guard():
    let = al.LetI(al.ListE((al.NameE("c"),)), APP)
    cond, same = guard_partiality(let)
    assert same is let
    assert cond == al.CompareC("is", al.LengthE(APP), al.NumE(1))


def test_scalar_binding_needs_no_guard():
    let = al.LetI(al.NameE("c"), al.AppE("f", (al.NameE("a"),)))
    assert guard_partiality(let) == (None, let)


def test_pair_pattern_needs_length_two():
    let = al.LetI(al.ListE((al.NameE("a"), al.NameE("b"))), al.AppE("g", ()))
    cond, _ = guard_partiality(let)
    assert cond.rhs == al.NumE(len(let.pattern.elements)) == al.NumE(2)
