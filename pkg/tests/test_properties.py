"""Property suites: parser round trip, binding soundness, re-check soundness, stack discipline."""

import copy

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from progen import ProgramGenerator, program
from spectec.al import ast as al
from spectec.al.animate import AnimationError, animate_rule_group, binding_problems, \
    instruction_groups
from spectec.corpus.minwast import TestScript, format_script, parse_test_script
from spectec.diagnostics import SpecError
from spectec.el.parser import parse_text
from spectec.el.pretty import pretty_el
from spectec.il.elaborate import elaborate
from spectec.il.verify import dangling_references, verify
from spectec.runtime.interp import Config, Context, Store, Trap, Values, const
from spectec.runtime.module import instantiate, value

SETTINGS = settings(max_examples=150, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

# -- EL text -----------------------------------------------------------------

lowers = st.sampled_from(["a", "b", "c", "nt", "x", "binop"])
subs = st.sampled_from(["", "_1", "_2", "_k"])
uppers = st.sampled_from(["CONST", "NOP", "I32", "BINOP", "LABEL_", "TRAP", "LOCAL.GET"])
funcs = st.sampled_from(["$f", "$binop", "$local"])


def _atoms(inner):
    return st.one_of(
        st.builds(lambda v, s: v + s, lowers, subs),
        st.integers(0, 999).map(str),
        st.just("epsilon"),
        uppers,
        st.builds(lambda f, xs: f"{f}(" + ", ".join(xs) + ")", funcs, st.lists(inner, max_size=3)),
        inner.map(lambda e: f"({e})"),
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: "(" + ", ".join(xs) + ")"),
        st.lists(inner, max_size=3).map(lambda xs: "[" + ", ".join(xs) + "]"),
        inner.map(lambda e: f"|{e}|"),
    )


def _postfix(inner):
    base = _atoms(inner)
    return st.one_of(
        base,
        st.builds(lambda a, it: a + it, base, st.sampled_from(["*", "?"])),
        st.builds(lambda a, n: f"{a}^{n}", base, st.sampled_from(["n", "3", "(k)"])),
        st.builds(lambda a, i: f"{a}[{i}]", base, inner),
    )


def _seq(inner):
    app = st.one_of(
        _postfix(inner),
        st.builds(lambda c, xs: "(" + " ".join([c] + xs) + ")", uppers,
                  st.lists(_postfix(inner), min_size=1, max_size=3)),
    )
    return st.lists(app, min_size=1, max_size=3).map(" ".join)


expressions = st.recursive(
    st.builds(lambda v, s: v + s, lowers, subs),
    lambda inner: st.one_of(
        _seq(inner),
        st.builds(lambda a, op, b: f"{a} {op} {b}", _seq(inner), st.sampled_from("+-"),
                  _seq(inner)),
    ),
    max_leaves=8,
)

premises = st.one_of(
    st.just("otherwise"),
    st.builds(lambda a, op, b: f"if {a} {op} {b}", expressions,
              st.sampled_from(["=", "=/=", "<", "<=", ">", ">="]), expressions),
    st.builds(lambda a, b, it: f"(if {a} = {b}){it}", expressions, expressions,
              st.sampled_from("*?")),
)

types = st.builds(lambda n, it: n + it, st.sampled_from(["nat", "instr", "val", "numtype"]),
                  st.sampled_from(["", "*", "?"]))

definitions = st.one_of(
    st.builds(lambda cs: "syntax s = " + " | ".join(cs),
              st.lists(st.builds(lambda c, ts: " ".join([c] + ts), uppers,
                                 st.lists(types, max_size=2)), min_size=1, max_size=4)),
    st.builds(lambda n: "syntax " + n, st.sampled_from(["state", "opaque"])),
    st.builds(lambda v, t: f"var {v} : {t}", lowers, types),
    st.builds(lambda ts, r: "def $f(" + ", ".join(ts) + f") : {r}", st.lists(types, max_size=3),
              types),
    st.builds(lambda xs, r, ps: "def $f(" + ", ".join(xs) + f") = {r}"
              + "".join(f"\n  -- {p}" for p in ps),
              st.lists(expressions, max_size=3), expressions, st.lists(premises, max_size=2)),
    st.builds(lambda a, b: f"relation Step: {a} ~> {b}", types, types),
    st.builds(lambda i, l, r, ps: f"rule Step/r-{i}: {l} ~> {r}"
              + "".join(f"\n  -- {p}" for p in ps),
              st.integers(0, 99), expressions, expressions, st.lists(premises, max_size=3)),
)

scripts = st.lists(definitions, max_size=6).map("\n".join)


@SETTINGS
@given(scripts)
def test_parser_round_trip(text):
    try:
        first = parse_text(text)
    except SpecError:
        assume(False)
    printed = pretty_el(first)
    assert parse_text(printed) == first
    assert pretty_el(parse_text(printed)) == printed


@SETTINGS
@given(st.integers(0, 2**32))
def test_minwast_round_trip(seed):
    gen = ProgramGenerator(seed)
    mod = gen.module()
    script = TestScript([mod] + gen.invokes(mod))
    again = parse_test_script(format_script(script))
    assert again == script


# -- random rules over a fixed prelude -----------------------------------------

PRELUDE = """\
syntax numtype = I32 | I64
syntax val = CONST numtype nat
syntax instr = val | OP numtype nat
var nt : numtype
var c : nat
var k : nat
relation Step_pure: instr* ~> instr*
def $f(nat, nat) : nat
def $g(nat) : nat?
def $h(nat) : nat*
"""

NAMES = ["c_1", "c_2", "c_3", "c_4", "c_5", "c_6"]


@st.composite
def rules(draw):
    """``(text, inputs, premises)`` for a rule that pops some operands.

    Each premise is ``(lhs_vars, is_call, rhs_var)``. Arguments are drawn from
    every name, bound or not, and the premises are shuffled, so some rules
    need reordering and some cannot be animated at all.
    """
    pops = draw(st.integers(0, 3))
    inputs = NAMES[:pops] + ["k"]
    names = NAMES[:pops + draw(st.integers(1, 3))]
    prems = []
    for out in names[pops:]:
        pool = st.sampled_from(inputs + names[pops:])
        if draw(st.booleans()):
            prems.append(((draw(pool), draw(pool)), True, out))
        else:
            prems.append(((draw(pool),), True, out))
    for _ in range(draw(st.integers(0, 2))):
        prems.append(((draw(st.sampled_from(inputs + names)),), False,
                      draw(st.sampled_from(inputs + names))))
    prems = draw(st.permutations(prems))
    result = draw(st.sampled_from(names + ["k"]))
    lhs = " ".join([f"(CONST nt {v})" for v in NAMES[:pops]] + ["(OP nt k)"])
    lines = []
    for args, is_call, out in prems:
        if not is_call:
            lines.append(f"{args[0]} = {out}")
        elif len(args) == 2:
            lines.append(f"$f({args[0]}, {args[1]}) = {out}")
        else:
            lines.append(f"$g({args[0]}) = {out}")
    text = f"rule Step_pure/r: {lhs} ~> (CONST nt {result})"
    text += "".join(f"\n  -- if {p}" for p in lines)
    return text, set(inputs), prems, result


def bindable(inputs, prems, result) -> bool:
    """Brute force over every premise order: does one bind each variable before use?

    A premise is usable once its call side is bound (it then binds the
    variable on the other side) or, for a variable equation, once either
    side is bound.
    """
    import itertools
    for order in itertools.permutations(prems):
        bound = set(inputs)
        for args, is_call, out in order:
            if set(args) <= bound:
                bound.add(out)
            elif not is_call and out in bound:
                bound |= set(args)
            else:
                break
        else:
            if result in bound:
                return True
    return False


def _elaborated(text):
    try:
        return elaborate(parse_text(PRELUDE + text))
    except SpecError:
        assume(False)


@SETTINGS
@given(rules())
def test_binding_soundness(case):
    text, inputs, prems, result = case
    script = _elaborated(text)
    rules_ = instruction_groups(script)["OP"]
    try:
        alg = animate_rule_group(rules_, script)
    except AnimationError:
        assert not bindable(inputs, prems, result), text
        return
    assert binding_problems(alg) == [], text
    assert bindable(inputs, prems, result), text


@SETTINGS
@given(rules())
def test_recheck_soundness(case):
    script = _elaborated(case[0])
    assert verify(script) == []
    assert dangling_references(script) == []


def test_recheck_soundness_on_corpus(checked):
    assert verify(checked.il) == []


# -- runtime ---------------------------------------------------------------------

@SETTINGS
@given(st.integers(0, 2**32))
def test_stack_discipline(interp, seed):
    mod, calls = program(seed)
    cfg = instantiate(mod)
    exports = mod.exports()
    for call in calls:
        idx = exports[call.name]
        r = interp.invoke(cfg, idx, [value(t, b) for t, b in call.args])
        if isinstance(r, Values):
            assert [v[1][0].lower() for v in r.values] == mod.funcs[idx].results
        else:
            assert isinstance(r, Trap)
        assert cfg.stack == [] and cfg.pending == [] and cfg.contexts == []


ops = st.sampled_from(["ADD", "SUB", "MUL", "DIV_S", "DIV_U", "REM_S", "SHL", "ROTR", "AND"])
nts = st.sampled_from(["I32", "I64"])


@st.composite
def al_exprs(draw):
    nt = draw(nts)
    app = al.AppE("binop", (al.ConstructE(draw(ops), ()), al.ConstructE(nt, ()),
                            al.NameE("c_1"), al.NameE("c_2")))
    return draw(st.sampled_from([app, al.LengthE(app), al.ListE((al.NameE("c_1"), app)),
                                 al.ConstructE("CONST", (al.ConstructE(nt, ()),
                                                         al.NameE("c_2")))]))


@SETTINGS
@given(al_exprs(), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_eval_expr_purity(interp, expr, a, b):
    cfg = Config(Store())
    cfg.contexts = [Context("FRAME_", (0, ("LOCALS", [])), 0, None, [])]
    cfg.stack = [const("I32", a)]
    env = {"c_1": a, "c_2": b}
    snapshot = copy.deepcopy((env, cfg.stack, cfg.pending, cfg.store.globals))
    first = interp.eval_expr(expr, env, cfg)
    assert interp.eval_expr(expr, env, cfg) == first
    assert (env, cfg.stack, cfg.pending, cfg.store.globals) == snapshot
