"""Shared strategies, helpers and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from kawahara.spectral import SpectralField, TorusGrid, random_real_field

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Store and print one pass/fail line per acceptance criterion."""

    def _record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def real_field(seed: int, M: int, lam: float = 1.0, decay: float = 1.0, zero_mean: bool = False) -> SpectralField:
    return random_real_field(TorusGrid(lam, M), np.random.default_rng(seed), decay=decay, zero_mean=zero_mean)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_M = st.integers(min_value=1, max_value=8)
lambdas = st.sampled_from([1.0, 2.0, 3.0, 4.0])
