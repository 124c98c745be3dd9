import pytest

from helpers import ACCEPTANCE_LINES, CORPUS_SEED, CORPUS_SIZE, fixture_automata, gated_random


@pytest.fixture(scope="session")
def random_corpus():
    return gated_random(CORPUS_SIZE, CORPUS_SEED)


@pytest.fixture(scope="session")
def corpus(random_corpus):
    return fixture_automata("T1", "T2", "T4", "T5") + random_corpus


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
