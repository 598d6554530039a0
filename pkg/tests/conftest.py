import itertools

import numpy as np
import pytest

from kuracert.graph import build_graph


def random_connected_graph(rng: np.random.Generator, n: int, p: float | None = None):
    """Random spanning tree plus extra edges with probability p."""
    p = rng.uniform(0.0, 0.6) if p is None else p
    order = rng.permutation(n) + 1
    edges = {tuple(sorted((int(order[i]), int(order[rng.integers(i)])))) for i in range(1, n)}
    for u, v in itertools.combinations(range(1, n + 1), 2):
        if rng.random() < p:
            edges.add((u, v))
    return build_graph(n, sorted(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
