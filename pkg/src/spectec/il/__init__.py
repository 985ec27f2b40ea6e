"""Typed internal language and the elaborator that produces it."""

from .ast import IlScript, IlRule, IlType, PrimT, SynT, TupleT, IterT, RecGroup
from .elaborate import elaborate, elaborate_with_diagnostics, infer_multiplicity
from .deps import dependency_groups
from .verify import verify, dangling_references

__all__ = [
    "IlScript", "IlRule", "IlType", "PrimT", "SynT", "TupleT", "IterT", "RecGroup",
    "elaborate", "elaborate_with_diagnostics", "infer_multiplicity",
    "dependency_groups", "verify", "dangling_references",
]
