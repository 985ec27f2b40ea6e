"""The bundled .spectec corpus, conformance suite and manifest."""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass, field
from typing import Optional, Union

from ..el.ast import ElScript
from ..el.parser import parse_text
from .minwast import TestParseError, TestScript, parse_test_script

ROOT = pathlib.Path(__file__).resolve().parent
MANIFEST = ROOT / "manifest.json"


class MissingFile(FileNotFoundError):
    pass


@dataclass
class CorpusManifest:
    files: list
    covered: list = field(default_factory=list)
    suite: list = field(default_factory=list)
    version: str = ""
    base: pathlib.Path = ROOT

    @classmethod
    def load(cls, path: Union[str, pathlib.Path] = MANIFEST) -> "CorpusManifest":
        path = pathlib.Path(path)
        if not path.is_file():
            raise MissingFile(f"manifest not found: {path}")
        data = json.loads(path.read_text(encoding="utf-8"))
        return cls(list(data["files"]), list(data.get("covered", [])),
                   list(data.get("suite", [])), str(data.get("version", "")), path.parent)

    def spec_paths(self) -> list:
        return [self.base / f for f in self.files]

    def suite_paths(self) -> list:
        return [self.base / f for f in self.suite]


def load_corpus(manifest: Optional[Union[CorpusManifest, str, pathlib.Path]] = None) -> ElScript:
    """Parse the manifest's files and concatenate them in order.

    Parse errors raise SpecError; a missing file raises MissingFile before any parsing.
    """
    if manifest is None or not isinstance(manifest, CorpusManifest):
        manifest = CorpusManifest.load(manifest or MANIFEST)
    paths = manifest.spec_paths()
    for p in paths:
        if not p.is_file():
            raise MissingFile(f"corpus file not found: {p}")
    script = ElScript()
    for p in paths:
        script = script + parse_text(p.read_text(encoding="utf-8"), str(p))
    return script


def spec_sources() -> list:
    """Paths of the bundled ``.spectec`` files in manifest order."""
    return CorpusManifest.load().spec_paths()


def suite_sources() -> list:
    return CorpusManifest.load().suite_paths()


__all__ = ["CorpusManifest", "MissingFile", "TestParseError", "TestScript", "load_corpus",
           "parse_test_script", "spec_sources", "suite_sources"]
