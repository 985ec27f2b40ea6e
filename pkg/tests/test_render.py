import pytest

from conftest import check_golden
from spectec.al import ast as al
from spectec.el import ast as el
from spectec.el.parser import parse_text
from spectec.render import (RenderRefused, check_balanced, render_all, render_checked,
                            render_latex, render_prose)
from spectec.render.prose import step_numbers

BINOP_RULES = """\
syntax numtype = I32 | I64 | F32 | F64
syntax c_numtype = nat
syntax binop = ADD | DIV_U
syntax val = CONST numtype c_numtype
syntax instr = val | BINOP numtype binop | TRAP
var nt : numtype
var c : c_numtype
relation Step_pure: instr* ~> instr*
def $binop(binop, numtype, c_numtype, c_numtype) : c_numtype?

rule Step_pure/binop-val:
  (CONST nt c_1) (CONST nt c_2) (BINOP nt binop) ~> (CONST nt c)
  -- if $binop(binop, nt, c_1, c_2) = c

rule Step_pure/binop-trap:
  (CONST nt c_1) (CONST nt c_2) (BINOP nt binop) ~> TRAP
  -- if $binop(binop, nt, c_1, c_2) = epsilon
"""


@pytest.fixture(scope="module")
def corpus_doc(checked):
    return render_checked(checked.el)


# -- LaTeX -------------------------------------------------------------------

def test_binop_rules_render_expected_tokens():
    tex = render_latex(parse_text(BINOP_RULES)).text()
    for token in (r"\hookrightarrow", r"\mathsf{trap}", r"\epsilon", r"\mathsf{const}"):
        assert token in tex
    assert r"\textsc{E-binop-val}" in tex or "E-binop-val" in tex


def test_empty_script_is_preamble_only():
    doc = render_latex(el.ElScript())
    assert doc.blocks == []
    assert doc.text().startswith(doc.preamble)
    assert doc.text().endswith("\\begin{document}\n\n\\end{document}\n")


def test_numtype_syntax_golden(corpus_doc):
    check_golden("numtype.tex", dict(corpus_doc.blocks)[("syntax", "numtype")])


def test_binop_rules_golden(corpus_doc):
    blocks = dict(corpus_doc.blocks)
    text = "\n".join(blocks[("rule", f"Step_pure/binop-{k}")] for k in ("val", "trap"))
    check_golden("binop-rules.tex", text)


def test_numtype_is_one_alternation_row(corpus_doc):
    block = dict(corpus_doc.blocks)[("syntax", "numtype")]
    assert r"\mathsf{i32} ~|~ \mathsf{i64} ~|~ \mathsf{f32} ~|~ \mathsf{f64}" in block
    assert block.count(r"\\") == 1


def test_unchecked_script_is_refused():
    broken = BINOP_RULES.replace("$binop(binop, nt, c_1, c_2) = c", "$binop(binop, nt, c_1) = c")
    with pytest.raises(RenderRefused) as e:
        render_latex(parse_text(broken))
    assert [d.code for d in e.value.diagnostics] == ["E-ARITY"]


def test_corpus_latex_is_balanced(corpus_doc):
    assert check_balanced(corpus_doc.text()) == []
    assert corpus_doc.warnings == []


def test_check_balanced_finds_problems():
    assert check_balanced(r"\begin{array}{l} x") == ["environment array not closed"]
    assert check_balanced("{ }}")
    assert check_balanced("$x")
    assert check_balanced(r"\{ \} \$ % { unmatched in comment") == []


def test_every_definition_rendered_once_with_unique_label(checked, corpus_doc):
    keys = [k for k, _ in corpus_doc.blocks]
    assert len(keys) == len(set(keys))
    labels = list(corpus_doc.anchors.values())
    assert len(labels) == len(set(labels))
    assert all(lab.startswith(f"def-{k[0]}-") for k, lab in corpus_doc.anchors.items())
    rules = {("rule", r.qualified_id) for r in checked.il.rules()}
    funcs = {("func", f) for f in checked.il.func_table}
    syntax = {("syntax", s) for s in checked.il.syntax_table}
    assert rules | funcs | syntax <= set(keys)
    for key, text in corpus_doc.blocks:
        assert text.count(r"\label{") == 1, key


def test_unknown_constructor_falls_back_with_warning():
    doc = render_latex(parse_text("syntax widget = GIZMO"))
    assert r"\mathtt{gizmo}" in doc.body()
    (w,) = doc.warnings
    assert w.severity == "warning" and "GIZMO" in w.message


def test_latex_is_deterministic(checked):
    assert render_checked(checked.el).text() == render_checked(checked.el).text()


# -- prose -------------------------------------------------------------------

def test_binop_prose_golden(algorithms):
    doc = render_prose(algorithms["BINOP"])
    check_golden("binop.rst", doc.rst())
    check_golden("binop.txt", render_prose(algorithms["BINOP"], rst=False).plain())


def test_binop_prose_skeleton(algorithms):
    (_, _, steps) = render_prose(algorithms["BINOP"]).sections[0]
    heads = [s.text.split(" ")[0] for s in steps]
    assert heads == ["Assert:", "Pop", "Assert:", "Pop", "If", "If"]
    assert [c.text.split(" ")[0] for c in steps[4].children] == ["Let", "Push"]
    assert [c.text for c in steps[5].children] == ["Trap."]


def test_nop_prose_golden(algorithms):
    check_golden("nop.rst", render_prose(algorithms["NOP"]).rst())


def test_empty_algorithm_has_heading_only():
    doc = render_prose(al.AlAlgorithm("EMPTY", (), ()))
    ((_, heading, steps),) = doc.sections
    assert heading == "empty" and steps == []
    assert doc.plain() == "empty\n"


ROMAN = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"]


def test_step_numbers_are_contiguous(pipeline):
    doc = render_all(pipeline[1])
    assert len(doc.sections) == len(pipeline[1])
    for _, _, steps in doc.sections:
        for level in step_numbers(steps):
            marks = [m.rstrip(".") for m in level]
            n = len(marks)
            assert marks in ([str(k) for k in range(1, n + 1)],
                             [chr(ord("a") + k) for k in range(n)], ROMAN[:n])


def test_prose_anchors_are_unique(pipeline):
    anchors = [a for a, _, _ in render_all(pipeline[1]).sections]
    assert len(anchors) == len(set(anchors))


def test_prose_is_deterministic(pipeline):
    assert render_all(pipeline[1]).rst() == render_all(pipeline[1]).rst()
