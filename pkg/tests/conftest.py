import numpy as np
import pytest

from chi2pulse.config import SweepConfig
from chi2pulse.experiments import Experiment
from chi2pulse.phasespace import QuadratureMap
from chi2pulse.symplectic import random_symplectic


@pytest.fixture(scope="session")
def fock_experiment():
    return Experiment(SweepConfig(grid_points=1024))


@pytest.fixture(scope="session")
def two_mode_experiment():
    return Experiment(SweepConfig(experiment="two_mode_squeezed", grid_points=1024))


def random_map(rng, M, N, extra=None, max_squeeze=0.8):
    """Rows of a random symplectic matrix split into ``A`` (first N modes) and ``B`` (the rest)."""
    extra = M if extra is None else extra
    tot = max(M, N) + extra
    S = random_symplectic(tot, rng, max_squeeze=max_squeeze)
    rows = list(range(M)) + list(range(tot, tot + M))
    A = S[np.ix_(rows, list(range(N)) + list(range(tot, tot + N)))]
    rest = list(range(N, tot))
    B = S[np.ix_(rows, rest + [tot + k for k in rest])]
    return QuadratureMap.from_matrices(A, B)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion; printed at the end of the run."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
