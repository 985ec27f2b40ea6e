"""External language: lexing, parsing and printing of DSL source."""

from .ast import ElScript
from .lexer import Token, tokenize
from .parser import ParseError, parse_script, parse_text
from .pretty import pretty_el

__all__ = ["ElScript", "Token", "tokenize", "ParseError", "parse_script", "parse_text", "pretty_el"]
