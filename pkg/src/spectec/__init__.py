"""Semantics toolchain for a WebAssembly subset.

DSL source is parsed into the external language (EL), checked and elaborated
into the typed internal language (IL), animated into algorithms (AL), and
rendered as LaTeX and prose. The algorithms double as an interpreter.
"""

__version__ = "0.1.0"
