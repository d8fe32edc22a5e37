import functools

import numpy as np
import pytest

from jchbound.model import ModelParams
from jchbound.secular import band_intervals, classify_eigenvalues
from jchbound.sector import solve_sector


@functools.lru_cache(maxsize=None)
def cached_solution(n, delta, g, p):
    return solve_sector(ModelParams(n, delta, 1.0, g), p)


@functools.lru_cache(maxsize=None)
def cached_bands(n, delta, g, p):
    return band_intervals(ModelParams(n, delta, 1.0, g), p)


def bound_indices(n, delta, g, p):
    """Indices into ``cached_solution(...).eigenvalues`` of the bound states."""
    sol = cached_solution(n, delta, g, p)
    margins = classify_eigenvalues(sol.eigenvalues, cached_bands(n, delta, g, p))
    margins[sol.spurious_flags] = 0.0
    return np.flatnonzero(margins > 0), margins


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def _report(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
