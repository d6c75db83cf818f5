"""Shared fixtures: memoized solves so expensive work is done once per session."""

import sys

import pytest

from robinfk.core import ProblemParams, Tolerances
from robinfk.radial import solve_ball


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.CRITERIA):
        if num in mod.RESULTS:
            ok, detail = mod.RESULTS[num]
            word = "PASS" if ok else "FAIL"
        else:
            word, detail = "NOT RUN", ""
        line = f"criterion {num:2d} [{word}] {mod.CRITERIA[num]}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))


@pytest.fixture(scope="session")
def ball():
    """Memoized radial solve: ball(p, beta, dim=2, radius=1.0, tol=None)."""
    cache = {}

    def get(p, beta, dim=2, radius=1.0, tol=None):
        key = (p, beta, dim, radius, tol)
        if key not in cache:
            cache[key] = solve_ball(ProblemParams(p=p, beta=beta, dim=dim), radius, tol)
        return cache[key]

    return get
