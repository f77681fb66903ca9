import pytest

from sosieforge.corpus import BUNDLED, load_program
from sosieforge.minilang import load

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo():
    return load_program("demo")


@pytest.fixture(scope="session")
def corpus_programs():
    return {name: load_program(name) for name in BUNDLED}


@pytest.fixture
def make():
    """Parse and typecheck a source snippet."""
    return load

