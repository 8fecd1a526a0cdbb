import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def brute_min_cut(n, edges):
    """Minimum over every proper cut side containing vertex 0; edges are (u, v, w) undirected."""
    if not edges:
        return 0.0
    u = np.array([e[0] for e in edges])
    v = np.array([e[1] for e in edges])
    w = np.array([e[2] for e in edges], dtype=float)
    ids = np.arange(1, 1 << (n - 1), dtype=np.int64)  # a set bit moves that vertex outside; V excluded
    inside = np.ones((ids.size, n), dtype=bool)
    inside[:, 1:] = ((ids[:, None] >> np.arange(n - 1)) & 1) == 0
    crossing = inside[:, u] != inside[:, v]
    return float((crossing * w).sum(axis=1).min())


def brute_st_cut(n, edges, s, t):
    """Minimum unit-weight s-t cut by enumeration."""
    best = np.inf
    others = [x for x in range(n) if x not in (s, t)]
    for mask in range(1 << len(others)):
        side = {s} | {others[i] for i in range(len(others)) if mask >> i & 1}
        best = min(best, sum(1 for a, b in edges if (a in side) != (b in side)))
    return int(best)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
