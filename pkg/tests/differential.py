"""Run seeded random programs through the extracted interpreter and the oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

from oracle import Instance
from progen import program
from spectec.runtime.interp import Trap
from spectec.runtime.module import instantiate, value

PROGRAMS = 10_000


@dataclass
class Outcome:
    programs: int = 0
    invokes: int = 0
    traps: int = 0
    divergences: list = field(default_factory=list)
    executed: set = field(default_factory=set)


def extracted(interp, cfg, index: int, args) -> tuple:
    try:
        r = interp.invoke(cfg, index, [value(t, b) for t, b in args])
    except Exception as e:  # any crash is a divergence, not a test error
        return ("error", repr(e))
    if isinstance(r, Trap):
        return ("trap",)
    return ("values", [(v[1][0].lower(), v[2]) for v in r.values])


def compare(interp, seeds) -> Outcome:
    out = Outcome()
    for seed in seeds:
        mod, calls = program(seed)
        cfg, orc = instantiate(mod), Instance(mod)
        exports = mod.exports()
        out.programs += 1
        for call in calls:
            interp.executed.clear()
            got = extracted(interp, cfg, exports[call.name], call.args)
            out.executed |= interp.executed
            want = orc.invoke(call.name, call.args)
            out.invokes += 1
            out.traps += want == ("trap",)
            if got != want:
                out.divergences.append((seed, call.name, call.args, got, want))
    return out
