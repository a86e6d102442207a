from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from schematic_ceres.eca import EcaBundle, corpus_path, load_document

# property suites run with fixed seeds
settings.register_profile(
    "fixed",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("fixed")


@pytest.fixture(scope="session")
def eca_doc():
    return load_document()


@pytest.fixture(scope="session")
def bundle(eca_doc):
    return EcaBundle(eca_doc)


@pytest.fixture(scope="session")
def eca_path():
    return str(corpus_path())


# --------------------------------------------------------------------------
# acceptance gate: one pass/fail line per criterion in the terminal summary

_GATE: list = []


class _Criterion:
    def __init__(self, cid: str, title: str):
        self.cid, self.title, self.notes = cid, title, []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        detail = "; ".join(self.notes)
        if exc is not None:
            first = str(exc).strip().splitlines()[0] if str(exc).strip() else exc_type.__name__
            detail = f"{detail}; {first}" if detail else first
        _GATE.append((self.cid, exc is None, self.title, detail))
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _GATE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, title, detail in sorted(_GATE, key=lambda r: r[0]):
        line = f"criterion {cid:<4} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
