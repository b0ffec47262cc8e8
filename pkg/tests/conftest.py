import json
from pathlib import Path

import pytest

from cpmx import load_model

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_model(name):
    return load_model((FIXTURES / f"{name}.json").read_bytes())


def fixture_params(name):
    return json.loads((FIXTURES / f"{name}.json").read_text())


@pytest.fixture
def vpai_case_before():
    return fixture_model("vpai_case_before")


@pytest.fixture
def vpai_case_after():
    return fixture_model("vpai_case_after")


@pytest.fixture
def vpas_case_before():
    return fixture_model("vpas_case_before")


@pytest.fixture
def two_vp():
    return fixture_model("two_vp")


def pytest_terminal_summary(terminalreporter):
    import sys
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(acceptance.RESULTS.items()):
        terminalreporter.write_line(line)
