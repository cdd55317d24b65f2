from __future__ import annotations

import numpy as np
import pytest

from isde import _backend, _pykernels
from isde.combinatorics import enumerate_subsets
from isde.data import SplitSpec
from isde.scoring import SubsetScoreTable

try:
    from isde import _kde_core, _solver_core
    COMPILED = True
except ImportError:
    COMPILED = False

BACKENDS = ["python"] + (["compiled"] if COMPILED else [])


def kde_module(name: str):
    return _kde_core if name == "compiled" else _pykernels


def solver_module(name: str):
    return _solver_core if name == "compiled" else _pykernels


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    monkeypatch.setattr(_backend, "kde_kernels", kde_module(request.param))
    monkeypatch.setattr(_backend, "solver_kernels", solver_module(request.param))
    return request.param


def random_table(d: int, k: int, seed: int, integer: bool = False) -> SubsetScoreTable:
    """Score table with random entries; integer scores make ties likely."""
    rng = np.random.default_rng(seed)
    entries = {}
    for s in enumerate_subsets(d, k):
        v = float(rng.integers(-3, 4)) if integer else float(rng.normal(0.0, 1.0) + 0.3 * len(s))
        entries[s] = (0.1, v)
    return SubsetScoreTable(d, k, SplitSpec(1, 1, seed), entries)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
