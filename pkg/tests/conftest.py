import numpy as np
import pytest

from coneasym import find_uniform_index

ACCEPTANCE_RESULTS = []


def random_stochastic(rng, d, density=None, diag_boost=0.1):
    """Random row-stochastic matrix with a random zero pattern, primitive."""
    while True:
        P = rng.random((d, d))
        dens = rng.uniform(0.3, 1.0) if density is None else density
        P *= rng.random((d, d)) < dens
        np.fill_diagonal(P, P.diagonal() + rng.random(d) * diag_boost)
        if np.any(P.sum(axis=1) == 0):
            continue
        P /= P.sum(axis=1, keepdims=True)
        if find_uniform_index(P) is not None:
            return P


def random_regular(rng, d):
    """Regular, power-bounded, with an interior fixed vector (not always 1)."""
    P = random_stochastic(rng, d)
    u = rng.uniform(0.2, 3.0, d) if rng.random() < 0.5 else np.ones(d)
    return np.diag(u) @ P @ np.diag(1.0 / u), u


def random_metzler(rng, d, scale=3.0, density=0.7):
    while True:
        G = rng.random((d, d)) * scale * (rng.random((d, d)) < density)
        np.fill_diagonal(G, 0.0)
        G -= np.diag(G.sum(axis=1))
        if find_uniform_index(np.eye(d) + G / (1 + np.max(-np.diag(G)))) is not None:
            return G


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain():
    return np.array([[0.9, 0.1], [0.2, 0.8]])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
