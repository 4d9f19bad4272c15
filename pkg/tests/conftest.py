import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).resolve().parent / "data"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def frozen():
    """Reference values from ``tests/oracles/generate.py`` (mpmath, no phimf imports)."""
    return json.loads((DATA / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracle_module():
    sys.path.insert(0, str(Path(__file__).resolve().parent / "oracles"))
    try:
        import generate
    finally:
        sys.path.pop(0)
    return generate


# one summary line per acceptance criterion, shown after the test run
_CRITERIA: dict = {}


@pytest.fixture
def record():
    def _record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
