import random

import mpmath as mp
import pytest

from qpv.linprob import random_state


@pytest.fixture
def rng():
    return random.Random(20240611)


def generic_states(seed, count, accept=None):
    rng = random.Random(seed)
    return [random_state(rng, accept=accept) for _ in range(count)]


def mag(v):
    """|v| as a float-free mpf, for order-of-magnitude comparisons."""
    return abs(mp.mpf(v)) if not isinstance(v, mp.mpc) else abs(v)


ACCEPTANCE_LINES: dict = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[criterion])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
