import numpy as np
import pytest

from choreo.dynamics import certify
from choreo.functionals import ProblemParams, body_positions, pair_distances
from choreo.loop import SymmetricLoop
from choreo.minimizer import SolverConfig, solve


def seed_loop(modes=12):
    return SymmetricLoop.from_modes(modes, {2: 1.0}, {1: 1.0})


def random_loop(rng, modes=12, decay=1.5, nc1=False):
    """Coefficients with k^-decay envelope; no guarantee about collisions."""
    k = np.concatenate([2.0 * np.arange(1, modes + 1), 2.0 * np.arange(1, modes + 1) - 1.0])
    c = rng.normal(size=2 * modes) * k**-decay
    if nc1:
        c[modes] = 0.0
    return SymmetricLoop.from_vector(c, nc1)


def perturbed_seed(rng, modes=8, size=0.15, min_dist=0.05):
    """Seed plus a random smooth perturbation, redrawn until comfortably collision-free."""
    while True:
        k = np.concatenate([2.0 * np.arange(1, modes + 1), 2.0 * np.arange(1, modes + 1) - 1.0])
        c = seed_loop(modes).to_vector() + size * rng.normal(size=2 * modes) / k**2
        loop = SymmetricLoop.from_vector(c)
        if pair_distances(body_positions(loop, 512)).min() > min_dist:
            return loop


@pytest.fixture
def seed():
    return seed_loop()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(scope="session")
def eight_m16():
    """Converged alpha = 1 orbit at 16 modes with its RK4 certificate."""
    params = ProblemParams(alpha=1.0)
    state, report = solve(params, SolverConfig(), modes=16)
    cert = certify(state.loop, params, steps=100_000, report=report)
    return params, state, report, cert


@pytest.fixture(scope="session")
def eight_m24():
    params = ProblemParams(alpha=1.0)
    state, report = solve(params, SolverConfig(), modes=24)
    return params, state, report


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
