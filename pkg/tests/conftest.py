from pathlib import Path

import pytest

from pbkit.parser import parse

DATA = Path(__file__).parent / "data"

_acceptance = []


@pytest.fixture
def wieliczka_text():
    return (DATA / "wieliczka.pb").read_text(encoding="utf-8")


@pytest.fixture
def wieliczka(wieliczka_text):
    result = parse(wieliczka_text)
    assert result.instance is not None, result.diagnostics
    return result.instance


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
