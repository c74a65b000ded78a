from __future__ import annotations

import pytest

from typedpg.demo import ARITH, ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze, declarative_extension, load_type_system_file

CORRECT_LINE = "result = strToInt(INT#)"


@pytest.fixture(scope="session")
def simple_gts():
    return load_type_system_file(SIMPLE_GTS_PATH)


@pytest.fixture(scope="session")
def java_profile(simple_gts):
    return simple_gts.profile("ANTLRJavaBackend")


@pytest.fixture()
def simple_ext(simple_gts):
    ext, _ = declarative_extension(simple_gts)
    return ext


@pytest.fixture(scope="session")
def arith_text() -> str:
    return ARITH_SPEC_PATH.read_text(encoding="utf-8")


@pytest.fixture()
def checked_arith(arith_text, simple_ext):
    return analyze(arith_text, simple_ext, "arith.tpg")


@pytest.fixture()
def arith_variant(arith_text, simple_ext):
    """Analyze the arithmetic spec with the INT action of factor replaced."""

    def make(line: str):
        assert CORRECT_LINE in arith_text
        return analyze(arith_text.replace(CORRECT_LINE, line), simple_ext, "arith.tpg")

    return make


@pytest.fixture(scope="session")
def arith_bindings():
    return ARITH


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
