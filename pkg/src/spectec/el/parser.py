"""Recursive-descent parser producing the EL script.

The grammar is documented in docs/grammar.md. Layout is insignificant:
definitions are delimited by their leading keyword, and premises by ``--``.
"""

from __future__ import annotations

from typing import Optional

from ..diagnostics import Diagnostic, SourceSpan, SpecError
from . import ast as el
from .lexer import Token, tokenize

TOP_KEYWORDS = frozenset({"syntax", "rule", "def", "relation", "var"})


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset = frozenset()):
        self.span = span
        self.expected = expected
        super().__init__(message)

    def diagnostic(self) -> Diagnostic:
        msg = str(self)
        if self.expected:
            msg += f" (expected one of: {', '.join(sorted(self.expected))})"
        return Diagnostic("error", "E-PARSE", msg, self.span)


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


class Parser:
    def __init__(self, tokens: list[Token], file_id: str = "<input>"):
        self.tokens = list(tokens)
        last = self.tokens[-1].span if self.tokens else SourceSpan(file_id, 1, 1, 1, 1)
        eof_span = SourceSpan(last.file, last.line_end, last.col_end, last.line_end, last.col_end)
        self.tokens.append(Token("EOF", "", eof_span))
        self.pos = 0

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        return self.tok.is_(kind, text)

    def at_sym(self, text: str) -> bool:
        return self.tok.is_("SYMBOL", text)

    def accept_sym(self, text: str) -> Optional[Token]:
        if self.at_sym(text):
            return self.advance()
        return None

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        want = text if text is not None else kind.lower()
        raise ParseError(f"unexpected {_describe(self.tok)}", self.tok.span, frozenset({want}))

    def prev_span(self) -> SourceSpan:
        return self.tokens[max(self.pos - 1, 0)].span

    # -- script ---------------------------------------------------------

    def parse_script(self) -> tuple[el.ElScript, list[Diagnostic]]:
        defs: list = []
        errors: list[Diagnostic] = []
        while not self.at("EOF"):
            start = self.pos
            try:
                defs.append(self.parse_def())
            except ParseError as e:
                errors.append(e.diagnostic())
                self.pos = max(self.pos, start + 1)
                while not self.at("EOF") and not (
                    self.tok.kind == "KEYWORD" and self.tok.text in TOP_KEYWORDS
                ):
                    self.advance()
        return el.ElScript(defs), errors

    def parse_def(self):
        t = self.tok
        if t.kind == "KEYWORD":
            if t.text == "syntax":
                return self.parse_syntax()
            if t.text == "var":
                return self.parse_var()
            if t.text == "def":
                return self.parse_func()
            if t.text == "relation":
                return self.parse_relation()
            if t.text == "rule":
                return self.parse_rule()
        raise ParseError(f"unexpected {_describe(t)} at top level", t.span, TOP_KEYWORDS)

    # -- types ----------------------------------------------------------

    def parse_type(self) -> el.ElType:
        t = self.expect("LOWER")
        it = None
        if self.at_sym("*") or self.at_sym("?"):
            it = self.advance().text
        return el.ElType(t.text, it, t.span.to(self.prev_span()))

    def _at_type(self) -> bool:
        return self.at("LOWER")

    def parse_syntax(self) -> el.SyntaxDef:
        kw = self.advance()
        name = self.expect("LOWER")
        if not self.accept_sym("="):
            return el.SyntaxDef(name.text, None, kw.span.to(self.prev_span()))
        self.accept_sym("|")
        cases = [self.parse_case()]
        while self.accept_sym("|"):
            cases.append(self.parse_case())
        return el.SyntaxDef(name.text, cases, kw.span.to(self.prev_span()))

    def parse_case(self) -> el.SyntaxCase:
        if self.at("UPPER"):
            con = self.advance()
            args = []
            while self._at_type():
                args.append(self.parse_type())
            return el.SyntaxCase(con.text, args, con.span.to(self.prev_span()))
        if self._at_type():
            ty = self.parse_type()
            return el.SyntaxCase(None, [ty], ty.span)
        raise ParseError(f"unexpected {_describe(self.tok)} in syntax case", self.tok.span,
                         frozenset({"upper", "lower"}))

    def parse_var(self) -> el.VarDecl:
        kw = self.advance()
        name = self.expect("LOWER")
        self.expect("SYMBOL", ":")
        ty = self.parse_type()
        return el.VarDecl(name.text, ty, kw.span.to(self.prev_span()))

    # -- functions ------------------------------------------------------

    def parse_func(self):
        kw = self.advance()
        name = self.expect("DOLLAR")
        self.expect("SYMBOL", "(")
        args: list = []
        if not self.at_sym(")"):
            args.append(self.parse_exp())
            while self.accept_sym(","):
                args.append(self.parse_exp())
        self.expect("SYMBOL", ")")
        if self.accept_sym(":"):
            params = [self._exp_to_type(a) for a in args]
            result = self.parse_type()
            return el.FuncDecl(name.text, params, result, kw.span.to(self.prev_span()))
        if self.accept_sym("="):
            body = self.parse_exp()
            prems = self.parse_premises()
            return el.FuncClause(name.text, args, body, prems, kw.span.to(self.prev_span()))
        raise ParseError(f"unexpected {_describe(self.tok)} after function head", self.tok.span,
                         frozenset({":", "="}))

    @staticmethod
    def _exp_to_type(e) -> el.ElType:
        if isinstance(e, el.VarE):
            return el.ElType(e.full, None, e.span)
        if isinstance(e, el.IterE) and isinstance(e.body, el.VarE) and e.iter in "*?":
            return el.ElType(e.body.full, e.iter, e.span)
        raise ParseError("parameter type expected", e.span, frozenset({"lower"}))

    # -- relations and rules --------------------------------------------

    def _parse_type_seq(self) -> list[el.ElType]:
        tys = [self.parse_type()]
        while self._at_type():
            tys.append(self.parse_type())
        return tys

    def parse_relation(self) -> el.RelationDecl:
        kw = self.advance()
        name = self.expect("UPPER")
        self.expect("SYMBOL", ":")
        if self.accept_sym("|-"):
            lhs = self._parse_type_seq()
            self.expect("SYMBOL", ":")
            rhs = self._parse_type_seq()
            return el.RelationDecl(name.text, "|-", None, lhs, None, rhs, kw.span.to(self.prev_span()))
        lhs_state = None
        lhs = self._parse_type_seq()
        if self.accept_sym(";"):
            lhs_state, lhs = lhs, self._parse_type_seq()
        self.expect("SYMBOL", "~>")
        rhs_state = None
        rhs = self._parse_type_seq()
        if self.accept_sym(";"):
            rhs_state, rhs = rhs, self._parse_type_seq()
        return el.RelationDecl(name.text, "~>", lhs_state, lhs, rhs_state, rhs,
                               kw.span.to(self.prev_span()))

    def parse_rule_id(self) -> str:
        parts = [self._rule_id_part()]
        while self.at_sym("-") or self.at_sym("."):
            parts.append(self.advance().text)
            parts.append(self._rule_id_part())
        return "".join(parts)

    def _rule_id_part(self) -> str:
        if self.at("LOWER") or self.at("NAT") or self.at("KEYWORD"):
            return self.advance().text
        raise ParseError(f"unexpected {_describe(self.tok)} in rule name", self.tok.span,
                         frozenset({"lower"}))

    def parse_rule(self) -> el.RuleDef:
        kw = self.advance()
        rel = self.expect("UPPER")
        self.expect("SYMBOL", "/")
        rid = self.parse_rule_id()
        self.expect("SYMBOL", ":")
        if self.accept_sym("|-"):
            lhs = self.parse_exp()
            self.expect("SYMBOL", ":")
            rhs = self.parse_exp()
            prems = self.parse_premises()
            return el.RuleDef(rel.text, rid, None, lhs, None, rhs, prems, "|-",
                              kw.span.to(self.prev_span()))
        lhs_state, lhs = self.parse_side()
        self.expect("SYMBOL", "~>")
        rhs_state, rhs = self.parse_side()
        prems = self.parse_premises()
        return el.RuleDef(rel.text, rid, lhs_state, lhs, rhs_state, rhs, prems, "~>",
                          kw.span.to(self.prev_span()))

    def parse_side(self):
        first = self.parse_exp()
        if self.accept_sym(";"):
            return first, self.parse_exp()
        return None, first

    def parse_premises(self) -> list:
        prems = []
        while self.at_sym("--"):
            dash = self.advance()
            prems.append(self.parse_premise(dash.span))
        return prems

    def parse_premise(self, start: SourceSpan):
        if self.at("KEYWORD", "otherwise"):
            self.advance()
            return el.ElsePremise(start.to(self.prev_span()))
        if self.at_sym("("):
            self.advance()
            body = self.parse_premise(self.tok.span)
            self.expect("SYMBOL", ")")
            if not (self.at_sym("*") or self.at_sym("?")):
                raise ParseError("iterated premise needs '*' or '?'", self.tok.span,
                                 frozenset({"*", "?"}))
            it = self.advance().text
            return el.IterPremise(body, it, start.to(self.prev_span()))
        self.expect("KEYWORD", "if")
        lhs = self.parse_exp()
        if not (self.tok.kind == "SYMBOL" and self.tok.text in el.CMP_OPS):
            raise ParseError(f"unexpected {_describe(self.tok)} in premise", self.tok.span,
                             frozenset(el.CMP_OPS))
        op = self.advance().text
        rhs = self.parse_exp()
        return el.IfPremise(lhs, op, rhs, start.to(self.prev_span()))

    # -- expressions ----------------------------------------------------

    def parse_exp(self, in_len: bool = False):
        e = self.parse_seq(in_len)
        while self.at_sym("+") or self.at_sym("-"):
            op = self.advance().text
            r = self.parse_seq(in_len)
            e = el.BinE(op, e, r, e.span.to(r.span))
        return e

    def _starts_atom(self, in_len: bool) -> bool:
        t = self.tok
        if t.kind in ("LOWER", "NAT", "DOLLAR", "UPPER"):
            return True
        if t.kind == "KEYWORD":
            return t.text == "epsilon"
        if t.kind == "SYMBOL":
            return t.text in ("(", "[") or (t.text == "|" and not in_len)
        return False

    def parse_seq(self, in_len: bool = False):
        if not self._starts_atom(in_len):
            raise ParseError(f"unexpected {_describe(self.tok)}, expression expected",
                             self.tok.span, frozenset({"expression"}))
        items = [self.parse_app(in_len)]
        while self._starts_atom(in_len):
            items.append(self.parse_app(in_len))
        if len(items) == 1:
            return items[0]
        flat = []
        for it in items:
            flat.extend(it.elements if isinstance(it, el.SeqE) else [it])
        return el.SeqE(flat, items[0].span.to(items[-1].span))

    def parse_app(self, in_len: bool):
        if self.at("UPPER"):
            con = self.advance()
            args = []
            while self._starts_atom(in_len):
                args.append(self.parse_postfix(in_len, arg_position=True))
            e = el.ConstructE(con.text, args, con.span.to(self.prev_span()))
            return e
        return self.parse_postfix(in_len)

    def parse_postfix(self, in_len: bool, arg_position: bool = False):
        e = self.parse_atom(in_len)
        while True:
            if self.at_sym("*") or self.at_sym("?"):
                it = self.advance()
                e = el.IterE(e, it.text, None, e.span.to(it.span))
            elif self.at_sym("^"):
                self.advance()
                count = self.parse_atom(in_len)
                e = el.IterE(e, "^", count, e.span.to(count.span))
            elif self.at_sym("[") and self.tok.span.line_start == self.prev_span().line_end \
                    and self.tok.span.col_start == self.prev_span().col_end + 1:
                self.advance()
                idx = self.parse_exp()
                close = self.expect("SYMBOL", "]")
                e = el.IdxE(e, idx, e.span.to(close.span))
            else:
                return e

    def parse_atom(self, in_len: bool):
        t = self.tok
        if t.kind == "LOWER":
            self.advance()
            return el.VarE(t.base, t.subscript, t.span)
        if t.kind == "NAT":
            self.advance()
            return el.NatE(int(t.text), t.span)
        if t.is_("KEYWORD", "epsilon"):
            self.advance()
            return el.OptE(None, t.span)
        if t.kind == "UPPER":
            self.advance()
            return el.ConstructE(t.text, [], t.span)
        if t.kind == "DOLLAR":
            self.advance()
            self.expect("SYMBOL", "(")
            args = []
            if not self.at_sym(")"):
                args.append(self.parse_exp())
                while self.accept_sym(","):
                    args.append(self.parse_exp())
            close = self.expect("SYMBOL", ")")
            return el.CallE(t.text, args, t.span.to(close.span))
        if t.is_("SYMBOL", "("):
            self.advance()
            first = self.parse_exp()
            if self.at_sym(","):
                args = [first]
                while self.accept_sym(","):
                    args.append(self.parse_exp())
                close = self.expect("SYMBOL", ")")
                return el.TupleE(args, t.span.to(close.span))
            close = self.expect("SYMBOL", ")")
            return _respan(first, t.span.to(close.span))
        if t.is_("SYMBOL", "["):
            self.advance()
            elems = []
            if not self.at_sym("]"):
                elems.append(self.parse_exp())
                while self.accept_sym(","):
                    elems.append(self.parse_exp())
            close = self.expect("SYMBOL", "]")
            return el.ListE(elems, t.span.to(close.span))
        if t.is_("SYMBOL", "|") and not in_len:
            self.advance()
            arg = self.parse_exp(in_len=True)
            close = self.expect("SYMBOL", "|")
            return el.LenE(arg, t.span.to(close.span))
        raise ParseError(f"unexpected {_describe(t)}, expression expected", t.span,
                         frozenset({"expression"}))


def _respan(e, span: SourceSpan):
    """Widen a parenthesized expression's span to include the parentheses."""
    import dataclasses
    return dataclasses.replace(e, span=span)


def parse_tokens(tokens: list[Token], file_id: str = "<input>") -> tuple[el.ElScript, list[Diagnostic]]:
    return Parser(tokens, file_id).parse_script()


def parse_script(tokens: list[Token], file_id: str = "<input>") -> el.ElScript:
    """Parse a token list; raises SpecError listing every syntax error found."""
    script, errors = parse_tokens(tokens, file_id)
    if errors:
        raise SpecError(errors)
    return script


def parse_text(text: str, file_id: str = "<input>") -> el.ElScript:
    return parse_script(tokenize(text, file_id), file_id)
