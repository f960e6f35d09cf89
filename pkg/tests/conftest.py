import pytest

from sepool.graph import Graph, make_grid, make_ring

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key == "acceptance":
            ACCEPTANCE[report.nodeid] = value


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE.values(), key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def k2():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def c4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def p4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def k4():
    return Graph.from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])


@pytest.fixture
def c6():
    return Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])


@pytest.fixture
def ring64():
    return make_ring(64)


@pytest.fixture
def grid8():
    return make_grid(8, 8)
