import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fockmetro import fock_core as fc  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def dense(state, n_max=None):
    """Matrix of a package state or operator on the oracle's full basis."""
    rho = state if isinstance(state, fc.HermitianOperator) else fc.to_density(state)
    n = rho.n_max if n_max is None else n_max
    return rho.on_basis(fc.full_basis(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
