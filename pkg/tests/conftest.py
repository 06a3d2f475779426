import warnings

import numpy as np
import pytest

import histoshep as hs

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def poly_data(coeffs, nodes):
    """Exact segment integrals of the monomial polynomial ``coeffs``."""
    P = np.polynomial.Polynomial(coeffs).integ()
    x = np.asarray(nodes, dtype=float)
    return P(x[1:]) - P(x[:-1])


def random_grid(rng, n, a=-1.0, b=1.0, spread=0.5):
    """Nodes with segment lengths in ``[(1 - spread) h, (1 + spread) h]``."""
    w = rng.uniform(1 - spread, 1 + spread, n)
    x = a + (b - a) * np.concatenate([[0.0], np.cumsum(w) / w.sum()])
    x[-1] = b
    return x


def random_admissible(rng, n_range=(20, 200), max_jumps=3):
    """Random grid plus jumps inside segments, admissible for d = 0."""
    while True:
        n = int(rng.integers(*n_range))
        x = random_grid(rng, n)
        m = int(rng.integers(0, max_jumps + 1))
        hosts = np.sort(rng.choice(np.arange(2, n), size=m, replace=False)) if m else np.array([], int)
        if m > 1 and np.min(np.diff(hosts)) < 2:
            continue
        jumps = [x[s - 1] + rng.uniform(0.2, 0.8) * (x[s] - x[s - 1]) for s in hosts]
        grid = hs.build_grid(x, np.zeros(n))
        part = hs.partition_continuity(grid, jumps)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if hs.compute_metrics(grid, part).admissible:
                return grid, part


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
