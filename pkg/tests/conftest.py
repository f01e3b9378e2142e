import random

import pytest
from hypothesis import HealthCheck, settings

from tbl.qfield import RatFunc

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line for the acceptance summary."""
    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240601)


def laurent(rng, terms=3, qdeg=3, rdeg=1):
    out = RatFunc.monomial(0, 0, 0)
    for _ in range(terms):
        out = out + RatFunc.monomial(rng.randint(-3, 3), rng.randint(-qdeg, qdeg), rng.randint(-rdeg, rdeg))
    return out
