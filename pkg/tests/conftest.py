from __future__ import annotations

import numpy as np
import pytest

from citescope import fixture_path
from citescope.ingest import parse_matrix

SEED = "Adv. Atmos. Sci."

_CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def table3_path():
    return fixture_path("table3.csv")


@pytest.fixture(scope="session")
def table3(table3_path):
    return parse_matrix(table3_path, "dense")


@pytest.fixture
def rng():
    return np.random.default_rng(20100101)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  [{detail}]"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
