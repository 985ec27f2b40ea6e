"""Run the extracted interpreter for exactly one reduction of a configuration."""

from __future__ import annotations

from spectec.runtime.interp import Config, Context, Store, step_instr

from relational import State


def configure(state: State, seq: list) -> Config:
    cfg = Config(Store(state.funcs, state.globals))
    cfg.contexts = [Context("FRAME_", (0, ("LOCALS", list(state.locals))), 0, None,
                            list(state.locals))]
    cfg.pending = list(reversed(seq))
    return cfg


def _is_value(x) -> bool:
    return type(x) is tuple and x[0] == "CONST"


def reduce_once(interp, state: State, seq: list) -> tuple:
    """``(state', seq')`` after the instruction at the end of ``seq`` has run.

    Leading values are pushed first. When the instruction is a context
    (a label or frame) the run continues until that context is exited.
    """
    cfg = configure(state, seq)
    while cfg.pending and _is_value(cfg.pending[-1]):
        step_instr(interp, cfg)
    depth = len(cfg.contexts)
    step_instr(interp, cfg)
    while len(cfg.contexts) > depth and cfg.pending:
        step_instr(interp, cfg)
    frame = cfg.contexts[0] if cfg.contexts else None
    locals_ = tuple(frame.locals) if frame is not None else state.locals
    out = list(cfg.stack) + list(reversed(cfg.pending))
    return State(locals_, cfg.store.globals, cfg.store.funcs), out
