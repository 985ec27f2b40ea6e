import pathlib
import sys

import pytest

TESTS = pathlib.Path(__file__).parent
sys.path.insert(0, str(TESTS))

from spectec.corpus import spec_sources, suite_sources  # noqa: E402
from spectec.pipeline import build, check_paths  # noqa: E402

GOLDEN = TESTS / "golden"


@pytest.fixture(scope="session")
def corpus_paths():
    return [str(p) for p in spec_sources()]


@pytest.fixture(scope="session")
def suite_paths():
    return [str(p) for p in suite_sources()]


@pytest.fixture(scope="session")
def checked(corpus_paths):
    c = check_paths(corpus_paths)
    assert c.ok, [d.format() for d in c.diagnostics]
    return c


@pytest.fixture(scope="session")
def pipeline():
    """(il, algorithms, interpreter) for the bundled corpus."""
    return build()


@pytest.fixture(scope="session")
def interp(pipeline):
    return pipeline[2]


@pytest.fixture(scope="session")
def algorithms(pipeline):
    return {a.instruction_name: a for a in pipeline[1]}


def check_golden(name: str, text: str) -> None:
    """Compare ``text`` with tests/golden/<name>; SPECTEC_UPDATE_GOLDEN=1 rewrites it."""
    import os
    path = GOLDEN / name
    if os.environ.get("SPECTEC_UPDATE_GOLDEN") == "1":
        path.parent.mkdir(exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert path.is_file(), f"missing golden file {path}"
    assert text == path.read_text(encoding="utf-8"), f"output differs from {path}"
