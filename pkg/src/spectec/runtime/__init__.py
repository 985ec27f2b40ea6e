"""Executable semantics: numerics and the AL interpreter."""

from .interp import (ArgumentMismatch, Config, Exhausted, Interpreter, InterpreterBug, Store, Trap,
                     Values, const, eval_expr, invoke, step_instr)

__all__ = ["ArgumentMismatch", "Config", "Exhausted", "Interpreter", "InterpreterBug", "Store",
           "Trap", "Values", "const", "eval_expr", "invoke", "step_instr"]
