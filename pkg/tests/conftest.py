"""Shared fixtures and the acceptance-report hook."""

from __future__ import annotations

import pytest

from krylov_lie.pipeline import run_scenario
from krylov_lie.scenarios import BUILTINS, builtin

#: Lines recorded by tests/test_acceptance.py, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []

_RESULTS: dict = {}


def builtin_result(name: str):
    """Full pipeline result (oracle included) for a built-in, computed once per session."""
    if name not in _RESULTS:
        _RESULTS[name] = run_scenario(builtin(name))
    return _RESULTS[name]


@pytest.fixture(scope="session")
def all_builtin_results():
    return {name: builtin_result(name) for name in BUILTINS}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
