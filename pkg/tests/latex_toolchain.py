"""Locate a LaTeX engine and compile a document with it.

A native engine on PATH wins. Otherwise the emscripten pdfTeX from the
``pdftex.js`` npm package is used through ``tools/pdflatex-wasm.js``
(install it with ``npm install --prefix tools``).
"""

from __future__ import annotations

import os
import pathlib
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field

TOOLS = pathlib.Path(__file__).resolve().parent.parent / "tools"
NATIVE = ("pdflatex", "lualatex", "xelatex", "tectonic")


@dataclass
class Compiled:
    engine: str
    returncode: int
    pdf_bytes: int
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.returncode == 0 and self.pdf_bytes > 0 and not self.errors


def find_engine() -> tuple[str, list[str]] | None:
    """``(name, argv prefix)`` of the first usable engine, or None."""
    for name in NATIVE:
        exe = shutil.which(name)
        if exe is None:
            continue
        if name == "tectonic":
            return name, [exe, "--outdir", "{out}", "{tex}"]
        return name, [exe, "-interaction=nonstopmode", "-halt-on-error",
                      "-output-directory", "{out}", "-jobname", "input", "{tex}"]
    node = shutil.which("node")
    wasm = pathlib.Path(os.environ.get("SPECTEC_PDFTEX_JS", TOOLS / "node_modules" / "pdftex.js"))
    if node and (wasm / "pdftex-worker.data").is_file():
        return "pdftex.js", [node, str(TOOLS / "pdflatex-wasm.js"), "{tex}", "{out}", str(wasm)]
    return None


def compile_latex(text: str, engine=None, timeout: float = 600) -> Compiled | None:
    """Compile ``text`` once; None when no engine is available."""
    engine = engine or find_engine()
    if engine is None:
        return None
    name, argv = engine
    with tempfile.TemporaryDirectory() as d:
        tex = pathlib.Path(d) / "input.tex"
        tex.write_text(text, encoding="utf-8")
        cmd = [a.format(out=d, tex=str(tex)) for a in argv]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout, cwd=d)
        pdf = pathlib.Path(d) / "input.pdf"
        log = pathlib.Path(d) / "input.log"
        log_text = log.read_text(encoding="latin-1") if log.is_file() else proc.stdout
        errors = [ln for ln in log_text.splitlines() if re.match(r"^! ", ln)]
        size = pdf.stat().st_size if pdf.is_file() else 0
        return Compiled(name, proc.returncode, size, errors)
