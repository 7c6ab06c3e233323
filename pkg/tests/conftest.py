import random
import time
from pathlib import Path

import pytest
from hypothesis import settings

from hoig.scheme import load_game

GAMES = Path(__file__).resolve().parent.parent / "games"
SUITE_BUDGET_S = 300.0

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: list[str] = []
_t0 = [0.0]


def game(scheme, nfa):
    return load_game(GAMES / scheme, GAMES / nfa)


@pytest.fixture
def doubling_game():
    return game("doubling.hors", "only_b.nfa")


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_sessionstart(session):
    _t0[0] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _t0[0]
    ok = elapsed <= SUITE_BUDGET_S
    ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'} criterion 6 (suite runtime): {elapsed:.1f} s <= {SUITE_BUDGET_S:.0f} s")
    if not ok:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
