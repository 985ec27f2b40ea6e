"""Reader and writer for ``.minwast`` conformance scripts.

The format is a small s-expression subset of the WebAssembly text format:
``module`` commands with functions and globals, ``invoke``, ``assert_return``
and ``assert_trap``. See docs/minwast.md for the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from ..runtime.numerics import CANONICAL_NAN, MASK, WIDTH, round_fraction, to_float

NUMTYPES = ("i32", "i64", "f32", "f64")


class TestParseError(Exception):
    __test__ = False  # not a pytest class

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# -- data model -------------------------------------------------------------

@dataclass
class Instr:
    """One instruction; structured ones carry nested bodies."""

    op: str
    args: tuple = ()
    body: tuple = ()
    else_body: tuple = ()
    result: tuple = ()  # block type: () or (numtype,)


@dataclass
class Func:
    name: Optional[str]
    params: list
    results: list
    locals: list
    body: list
    exports: list = field(default_factory=list)


@dataclass
class Global:
    name: Optional[str]
    type: str
    mutable: bool
    init: int
    exports: list = field(default_factory=list)


@dataclass
class Module:
    funcs: list = field(default_factory=list)
    globals: list = field(default_factory=list)
    line: int = field(default=0, compare=False)

    def exports(self) -> dict:
        return {e: i for i, f in enumerate(self.funcs) for e in f.exports}


@dataclass
class Invoke:
    name: str
    args: list  # [(numtype, bits)]
    line: int = field(default=0, compare=False)


@dataclass
class AssertReturn:
    invoke: Invoke
    expected: list  # [(numtype, bits | "nan:canonical" | "nan:arithmetic")]
    line: int = field(default=0, compare=False)


@dataclass
class AssertTrap:
    invoke: Invoke
    message: str = ""
    line: int = field(default=0, compare=False)


Command = Union[Module, Invoke, AssertReturn, AssertTrap]


@dataclass
class TestScript:
    __test__ = False

    commands: list = field(default_factory=list)

    def assertions(self) -> list:
        return [c for c in self.commands if isinstance(c, (AssertReturn, AssertTrap))]


# -- s-expressions ----------------------------------------------------------

@dataclass
class Atom:
    text: str
    line: int
    col: int
    string: bool = False


@dataclass
class SList:
    items: list
    line: int
    col: int

    def head(self) -> Optional[str]:
        if self.items and isinstance(self.items[0], Atom) and not self.items[0].string:
            return self.items[0].text
        return None


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<line_comment>;;[^\n]*)
  | (?P<block_comment>\(;)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<atom>[^\s()";]+)
""", re.VERBOSE)


def _sexprs(text: str) -> list:
    stack: list = [SList([], 1, 1)]
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise TestParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "block_comment":
            depth, i = 1, m.end()
            while depth and i < len(text):
                if text.startswith("(;", i):
                    depth, i = depth + 1, i + 2
                elif text.startswith(";)", i):
                    depth, i = depth - 1, i + 2
                else:
                    i += 1
            if depth:
                raise TestParseError("unterminated block comment", line, col)
            end = i
        else:
            end = m.end()
            if kind == "open":
                stack.append(SList([], line, col))
            elif kind == "close":
                if len(stack) == 1:
                    raise TestParseError("unbalanced ')'", line, col)
                done = stack.pop()
                stack[-1].items.append(done)
            elif kind == "string":
                stack[-1].items.append(Atom(_unescape(m.group()[1:-1]), line, col, True))
            elif kind == "atom":
                stack[-1].items.append(Atom(m.group(), line, col))
        chunk = text[pos:end]
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = end
    if len(stack) != 1:
        top = stack[-1]
        raise TestParseError("unclosed '('", top.line, top.col)
    return stack[0].items


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s)


# -- literals ---------------------------------------------------------------

def parse_int(nt: str, text: str) -> int:
    """Bits of an integer literal; accepts signed and unsigned forms."""
    s = text.replace("_", "")
    neg = s.startswith("-")
    if s[:1] in "+-":
        s = s[1:]
    v = int(s, 16) if s.lower().startswith("0x") else int(s, 10)
    width = 32 if nt == "i32" else 64
    if (neg and v > 1 << (width - 1)) or (not neg and v >= 1 << width):
        raise ValueError(f"constant out of range for {nt}")
    return (-v if neg else v) & MASK[nt.upper()]


def parse_float(nt: str, text: str) -> int:
    """Bits of a float literal: decimal, hex, inf, nan, nan:0xPAYLOAD."""
    key = nt.upper()
    s = text.replace("_", "")
    neg = s.startswith("-")
    if s[:1] in "+-":
        s = s[1:]
    sign = (1 << (31 if key == "F32" else 63)) if neg else 0
    mant_bits = 23 if key == "F32" else 52
    exp_all = (0xFF if key == "F32" else 0x7FF) << mant_bits
    if s == "inf":
        return sign | exp_all
    if s == "nan":
        return sign | CANONICAL_NAN[key]
    if s.startswith("nan:0x"):
        payload = int(s[6:], 16)
        if not 0 < payload < 1 << mant_bits:
            raise ValueError("NaN payload out of range")
        return sign | exp_all | payload
    if s.lower().startswith("0x"):
        q = _hex_fraction(s[2:])
    else:
        if not re.fullmatch(r"\d+(\.\d*)?([eE][+-]?\d+)?", s):
            raise ValueError(f"malformed float literal {text!r}")
        q = Fraction(s)
    return round_fraction(key, q, neg)


def _hex_fraction(s: str) -> Fraction:
    m = re.fullmatch(r"([0-9a-fA-F]*)(?:\.([0-9a-fA-F]*))?(?:[pP]([+-]?\d+))?", s)
    if not m or not (m.group(1) or m.group(2)):
        raise ValueError(f"malformed hex float 0x{s}")
    whole, frac, exp = m.group(1) or "0", m.group(2) or "", int(m.group(3) or 0)
    q = Fraction(int(whole + frac, 16), 16 ** len(frac))
    return q * Fraction(2) ** exp


def parse_const(nt: str, text: str) -> int:
    return parse_float(nt, text) if nt[0] == "f" else parse_int(nt, text)


def format_const(nt: str, bits) -> str:
    """Literal text that reads back to exactly ``bits``."""
    if isinstance(bits, str):
        return bits
    if nt[0] == "i":
        width = 32 if nt == "i32" else 64
        return str(bits - (1 << width) if bits >> (width - 1) else bits)
    key = nt.upper()
    width = WIDTH[key]
    mant_bits = 23 if key == "F32" else 52
    if (bits >> mant_bits) & ((1 << (width - 1 - mant_bits)) - 1) == (1 << (width - 1 - mant_bits)) - 1:
        sign = "-" if bits >> (width - 1) else ""
        mant = bits & ((1 << mant_bits) - 1)
        return f"{sign}inf" if mant == 0 else f"{sign}nan:0x{mant:x}"
    # every f32 value is exactly representable as a double
    return re.sub(r"\.?0*p", "p", to_float(key, bits).hex())


# -- instructions -----------------------------------------------------------

PLAIN = {"nop", "drop", "select", "unreachable", "return"}
INDEXED = {"local.get", "local.set", "local.tee", "global.get", "global.set", "call", "br", "br_if"}
BLOCKS = {"block", "loop", "if"}
NUMERIC = {
    "int_unop": ["clz", "ctz", "popcnt"],
    "float_unop": ["neg", "abs", "sqrt"],
    "int_binop": ["add", "sub", "mul", "div_s", "div_u", "rem_s", "rem_u", "and", "or", "xor",
                  "shl", "shr_s", "shr_u", "rotl", "rotr"],
    "float_binop": ["add", "sub", "mul", "div", "min", "max"],
    "int_testop": ["eqz"],
    "int_relop": ["eq", "ne", "lt_s", "lt_u", "gt_s", "gt_u", "le_s", "le_u", "ge_s", "ge_u"],
    "float_relop": ["eq", "ne", "lt", "gt", "le", "ge"],
}


def numeric_class(op: str) -> Optional[tuple]:
    """``("binop", "i32", "add")`` for ``i32.add``; None for non-numeric ops."""
    nt, _, name = op.partition(".")
    if nt not in NUMTYPES:
        return None
    if name == "const":
        return ("const", nt, name)
    prefix = "int" if nt[0] == "i" else "float"
    for cls in ("unop", "binop", "testop", "relop"):
        if name in NUMERIC.get(f"{prefix}_{cls}", ()):
            return (cls, nt, name)
    return None


def is_instr_keyword(op: str) -> bool:
    return op in PLAIN or op in INDEXED or op in BLOCKS or numeric_class(op) is not None


class _Names:
    def __init__(self):
        self.funcs: dict = {}
        self.globals: dict = {}


class _FuncParser:
    def __init__(self, names: _Names, locals_: dict):
        self.names = names
        self.locals = locals_
        self.labels: list = []  # innermost last; None for anonymous

    def _err(self, node, msg):
        raise TestParseError(msg, node.line, node.col)

    def index(self, op: str, tok) -> int:
        if not isinstance(tok, Atom) or tok.string:
            self._err(tok, f"{op} expects an index")
        text = tok.text
        if text.startswith("$"):
            if op.startswith("local."):
                table = self.locals
            elif op.startswith("global."):
                table = self.names.globals
            elif op == "call":
                table = self.names.funcs
            else:
                for depth, lab in enumerate(reversed(self.labels)):
                    if lab == text:
                        return depth
                self._err(tok, f"unknown label {text}")
            if text not in table:
                self._err(tok, f"unknown identifier {text}")
            return table[text]
        try:
            return parse_int("i64", text)
        except ValueError:
            self._err(tok, f"malformed index {text!r}")

    def block_header(self, items, i):
        label = None
        if i < len(items) and isinstance(items[i], Atom) and items[i].text.startswith("$"):
            label, i = items[i].text, i + 1
        result: tuple = ()
        while i < len(items) and isinstance(items[i], SList) and items[i].head() == "result":
            types = [self.numtype(a) for a in items[i].items[1:]]
            result += tuple(types)
            i += 1
        if len(result) > 1:
            self._err(items[i - 1], "blocks may have at most one result")
        return label, result, i

    def numtype(self, tok) -> str:
        if not isinstance(tok, Atom) or tok.text not in NUMTYPES:
            self._err(tok, "expected a number type")
        return tok.text

    def seq(self, items, i=0, stop=("end",)) -> tuple:
        """Parse instructions from ``items[i:]`` until a stop keyword; returns (instrs, i)."""
        out: list = []
        while i < len(items):
            tok = items[i]
            if isinstance(tok, SList):
                out.extend(self.folded(tok))
                i += 1
                continue
            if tok.string:
                self._err(tok, "unexpected string")
            if tok.text in stop:
                return out, i
            i = self.plain(items, i, out)
        return out, i

    def plain(self, items, i, out) -> int:
        tok = items[i]
        op = tok.text
        if op in PLAIN:
            out.append(Instr(op))
            return i + 1
        if op in INDEXED:
            if i + 1 >= len(items):
                self._err(tok, f"{op} expects an index")
            out.append(Instr(op, (self.index(op, items[i + 1]),)))
            return i + 2
        cls = numeric_class(op)
        if cls is not None and cls[0] == "const":
            if i + 1 >= len(items) or not isinstance(items[i + 1], Atom):
                self._err(tok, f"{op} expects a literal")
            out.append(Instr(op, (self.literal(cls[1], items[i + 1]),)))
            return i + 2
        if cls is not None:
            out.append(Instr(op))
            return i + 1
        if op in BLOCKS:
            label, result, j = self.block_header(items, i + 1)
            self.labels.append(label)
            body, j = self.seq(items, j, ("end", "else") if op == "if" else ("end",))
            other: list = []
            if j < len(items) and items[j].text == "else":
                other, j = self.seq(items, j + 1, ("end",))
            self.labels.pop()
            if j >= len(items):
                self._err(tok, f"{op} without matching end")
            out.append(Instr(op, (), tuple(body), tuple(other), result))
            return self._skip_label(items, j + 1, label)
        self._err(tok, f"unknown instruction {op!r}")

    @staticmethod
    def _skip_label(items, j, label):
        if label and j < len(items) and isinstance(items[j], Atom) and items[j].text == label:
            return j + 1
        return j

    def literal(self, nt, tok) -> int:
        try:
            return parse_const(nt, tok.text)
        except ValueError as e:
            self._err(tok, str(e))

    def folded(self, node: SList) -> list:
        op = node.head()
        if op is None:
            self._err(node, "expected an instruction")
        items = node.items
        if op in ("block", "loop"):
            label, result, j = self.block_header(items, 1)
            self.labels.append(label)
            body, j = self.seq(items, j, ())
            self.labels.pop()
            return [Instr(op, (), tuple(body), (), result)]
        if op == "if":
            label, result, j = self.block_header(items, 1)
            cond: list = []
            while j < len(items) and not (isinstance(items[j], SList) and items[j].head() == "then"):
                if not isinstance(items[j], SList):
                    self._err(items[j], "expected a folded condition or (then ...)")
                cond.extend(self.folded(items[j]))
                j += 1
            if j >= len(items):
                self._err(node, "if without (then ...)")
            self.labels.append(label)
            then, _ = self.seq(items[j].items, 1, ())
            other: list = []
            if j + 1 < len(items):
                if not (isinstance(items[j + 1], SList) and items[j + 1].head() == "else"):
                    self._err(items[j + 1], "expected (else ...)")
                other, _ = self.seq(items[j + 1].items, 1, ())
            self.labels.pop()
            return cond + [Instr("if", (), tuple(then), tuple(other), result)]
        head: list = []
        j = self.plain(items, 0, head)
        operands: list = []
        for sub in items[j:]:
            if not isinstance(sub, SList):
                self._err(sub, "unexpected token in folded instruction")
            operands.extend(self.folded(sub))
        return operands + head


# -- modules and commands ---------------------------------------------------

def _module(node: SList) -> Module:
    names = _Names()
    fields = node.items[1:]
    nf = ng = 0
    for f in fields:
        if not isinstance(f, SList):
            raise TestParseError("expected a module field", f.line, f.col)
        kind = f.head()
        ident = f.items[1].text if len(f.items) > 1 and isinstance(f.items[1], Atom) \
            and f.items[1].text.startswith("$") else None
        if kind == "func":
            if ident:
                names.funcs[ident] = nf
            nf += 1
        elif kind == "global":
            if ident:
                names.globals[ident] = ng
            ng += 1
    mod = Module(line=node.line)
    for f in fields:
        kind = f.head()
        if kind == "func":
            mod.funcs.append(_func(f, names))
        elif kind == "global":
            mod.globals.append(_global(f))
        elif kind == "export":
            _export(f, mod, names)
        else:
            raise TestParseError(f"unsupported module field {kind!r}", f.line, f.col)
    return mod


def _export(f: SList, mod: Module, names: _Names):
    items = f.items
    if len(items) != 3 or not isinstance(items[1], Atom) or not items[1].string \
            or not isinstance(items[2], SList) or items[2].head() != "func" or len(items[2].items) != 2:
        raise TestParseError('expected (export "name" (func idx))', f.line, f.col)
    ref = items[2].items[1]
    idx = names.funcs.get(ref.text) if ref.text.startswith("$") else None
    if idx is None:
        try:
            idx = int(ref.text)
        except ValueError:
            raise TestParseError(f"unknown function {ref.text}", ref.line, ref.col) from None
    # functions declared after this field are not parsed yet; resolved by the caller
    mod.__dict__.setdefault("_pending_exports", []).append((items[1].text, idx, ref))


def _func(f: SList, names: _Names) -> Func:
    items = f.items
    i = 1
    name = None
    if i < len(items) and isinstance(items[i], Atom) and items[i].text.startswith("$"):
        name, i = items[i].text, i + 1
    exports, params, results, locals_ = [], [], [], []
    local_names: dict = {}
    p = _FuncParser(names, local_names)
    while i < len(items) and isinstance(items[i], SList) and items[i].head() in (
            "export", "param", "result", "local"):
        sub = items[i]
        kind = sub.head()
        if kind == "export":
            if len(sub.items) != 2 or not sub.items[1].string:
                raise TestParseError('expected (export "name")', sub.line, sub.col)
            exports.append(sub.items[1].text)
        elif kind == "result":
            results.extend(p.numtype(a) for a in sub.items[1:])
        else:
            if kind == "param" and results:
                raise TestParseError("param after result", sub.line, sub.col)
            if kind == "param" and locals_:
                raise TestParseError("param after local", sub.line, sub.col)
            target = params if kind == "param" else locals_
            rest = sub.items[1:]
            if rest and isinstance(rest[0], Atom) and rest[0].text.startswith("$"):
                if len(rest) != 2:
                    raise TestParseError(f"named {kind} takes one type", sub.line, sub.col)
                local_names[rest[0].text] = len(params) + len(locals_)
                rest = rest[1:]
            target.extend(p.numtype(a) for a in rest)
        i += 1
    body, j = p.seq(items, i, ())
    return Func(name, params, results, locals_, body, exports)


def _global(f: SList) -> Global:
    items = f.items[1:]
    name = None
    if items and isinstance(items[0], Atom) and items[0].text.startswith("$"):
        name, items = items[0].text, items[1:]
    exports = []
    while items and isinstance(items[0], SList) and items[0].head() == "export":
        exports.append(items[0].items[1].text)
        items = items[1:]
    if len(items) != 2:
        raise TestParseError("expected (global type init)", f.line, f.col)
    ty, init = items
    mutable = isinstance(ty, SList) and ty.head() == "mut"
    tok = ty.items[1] if mutable else ty
    if not isinstance(tok, Atom) or tok.text not in NUMTYPES:
        raise TestParseError("expected a global type", f.line, f.col)
    nt = tok.text
    if not (isinstance(init, SList) and init.head() == f"{nt}.const" and len(init.items) == 2):
        raise TestParseError(f"global initializer must be ({nt}.const ...)", init.line, init.col)
    try:
        bits = parse_const(nt, init.items[1].text)
    except ValueError as e:
        raise TestParseError(str(e), init.line, init.col) from None
    return Global(name, nt, mutable, bits, exports)


def _value(node, allow_nan_class=False):
    if not isinstance(node, SList) or len(node.items) != 2:
        raise TestParseError("expected (<type>.const <literal>)", node.line, node.col)
    op = node.head() or ""
    nt = op.partition(".")[0]
    if op != f"{nt}.const" or nt not in NUMTYPES:
        raise TestParseError("expected (<type>.const <literal>)", node.line, node.col)
    text = node.items[1].text
    if allow_nan_class and nt[0] == "f" and text in ("nan:canonical", "nan:arithmetic"):
        return nt, text
    try:
        return nt, parse_const(nt, text)
    except ValueError as e:
        raise TestParseError(str(e), node.items[1].line, node.items[1].col) from None


def _invoke(node) -> Invoke:
    if not isinstance(node, SList) or node.head() != "invoke" or len(node.items) < 2 \
            or not node.items[1].string:
        raise TestParseError('expected (invoke "name" args...)', node.line, node.col)
    return Invoke(node.items[1].text, [_value(a) for a in node.items[2:]], node.line)


def parse_test_script(text: str) -> TestScript:
    """Parse a ``.minwast`` script; raises TestParseError with line/col."""
    script = TestScript()
    for node in _sexprs(text):
        if not isinstance(node, SList):
            raise TestParseError("expected a command", node.line, node.col)
        head = node.head()
        if head == "module":
            mod = _module(node)
            for name, idx, ref in mod.__dict__.pop("_pending_exports", []):
                if not 0 <= idx < len(mod.funcs):
                    raise TestParseError("export of unknown function", ref.line, ref.col)
                mod.funcs[idx].exports.append(name)
            script.commands.append(mod)
        elif head == "invoke":
            script.commands.append(_invoke(node))
        elif head == "assert_return":
            if len(node.items) < 2:
                raise TestParseError("assert_return needs an invoke", node.line, node.col)
            script.commands.append(AssertReturn(
                _invoke(node.items[1]), [_value(v, True) for v in node.items[2:]], node.line))
        elif head == "assert_trap":
            if len(node.items) not in (2, 3):
                raise TestParseError("expected (assert_trap (invoke ...) \"message\"?)",
                                     node.line, node.col)
            msg = node.items[2].text if len(node.items) == 3 else ""
            script.commands.append(AssertTrap(_invoke(node.items[1]), msg, node.line))
        else:
            raise TestParseError(f"unknown command {head!r}", node.line, node.col)
    return script


# -- printing ---------------------------------------------------------------

def _instrs(body, indent) -> list:
    pad = "  " * indent
    lines = []
    for ins in body:
        if ins.op in BLOCKS:
            res = f" (result {ins.result[0]})" if ins.result else ""
            lines.append(f"{pad}{ins.op}{res}")
            lines.extend(_instrs(ins.body, indent + 1))
            if ins.op == "if" and ins.else_body:
                lines.append(f"{pad}else")
                lines.extend(_instrs(ins.else_body, indent + 1))
            lines.append(f"{pad}end")
        elif ins.op.endswith(".const"):
            lines.append(f"{pad}{ins.op} {format_const(ins.op[:3], ins.args[0])}")
        else:
            lines.append(" ".join([pad + ins.op] + [str(a) for a in ins.args]))
    return lines


def format_module(mod: Module) -> str:
    lines = ["(module"]
    for g in mod.globals:
        ty = f"(mut {g.type})" if g.mutable else g.type
        ex = "".join(f' (export "{e}")' for e in g.exports)
        name = f" {g.name}" if g.name else ""
        lines.append(f"  (global{name}{ex} {ty} ({g.type}.const {format_const(g.type, g.init)}))")
    for f in mod.funcs:
        head = "  (func" + (f" {f.name}" if f.name else "")
        head += "".join(f' (export "{e}")' for e in f.exports)
        if f.params:
            head += f" (param {' '.join(f.params)})"
        if f.results:
            head += f" (result {' '.join(f.results)})"
        if f.locals:
            head += f" (local {' '.join(f.locals)})"
        lines.append(head)
        lines.extend(_instrs(f.body, 2))
        lines[-1] += ")"
    lines[-1] += ")"
    return "\n".join(lines)


def _fmt_value(v) -> str:
    nt, bits = v
    return f"({nt}.const {format_const(nt, bits)})"


def _fmt_invoke(inv: Invoke) -> str:
    return " ".join([f'(invoke "{inv.name}"'] + [_fmt_value(a) for a in inv.args]) + ")"


def format_script(script: TestScript) -> str:
    """Render a script back to text; parsing the result yields an equal script."""
    out = []
    for c in script.commands:
        if isinstance(c, Module):
            out.append(format_module(c))
        elif isinstance(c, Invoke):
            out.append(_fmt_invoke(c))
        elif isinstance(c, AssertReturn):
            out.append(" ".join(["(assert_return", _fmt_invoke(c.invoke)]
                                + [_fmt_value(v) for v in c.expected]) + ")")
        else:
            msg = f' "{c.message}"' if c.message else ""
            out.append(f"(assert_trap {_fmt_invoke(c.invoke)}{msg})")
    return "\n".join(out) + ("\n" if out else "")
