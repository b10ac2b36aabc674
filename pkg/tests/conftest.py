import pytest

from pathagg.instance import build_instance

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def minimal():
    return build_instance(2, 0, [(1, 0, "red")], {1: [0]})


@pytest.fixture
def join_pair():
    # r=0, u=1 (red u->r), v=2 (blue v->u->r)
    return build_instance(3, 0, [(1, 0, "red"), (2, 1, "blue"), (1, 0, "blue")], {1: [0], 2: [1, 2]})


@pytest.fixture
def crossing_pair():
    """Two terminals whose paths run into each other's start: u=1 -> a=3 -> v=2, v -> b=4 -> a."""
    arcs = [
        (1, 3, "blue"), (3, 2, "blue"), (2, 0, "blue"),
        (2, 4, "green"), (4, 3, "green"), (3, 0, "green"),
    ]
    return build_instance(5, 0, arcs, {1: [0, 1, 2], 2: [3, 4, 5]})


@pytest.fixture
def star():
    """u=1 blocked by z=4 (which reaches the root); v=2 and w=3 are both blocked by u."""
    arcs = [
        (1, 4, "u"), (4, 0, "u"),
        (2, 1, "v"), (1, 4, "v"), (4, 0, "v"),
        (3, 1, "w"), (1, 4, "w"), (4, 0, "w"),
        (4, 0, "z"),
    ]
    return build_instance(5, 0, arcs, {1: [0, 1], 2: [2, 3, 4], 3: [5, 6, 7], 4: [8]})


@pytest.fixture
def figure1_tree():
    """Chain r<-a<-b<-c<-d with an extra leaf e under c; every vertex has its own color."""
    parent = {1: 0, 2: 1, 3: 2, 4: 3, 5: 3}
    arcs = []
    paths = {}
    for v in sorted(parent):
        path = []
        x = v
        while x != 0:
            path.append(len(arcs))
            arcs.append((x, parent[x], f"c{v}"))
            x = parent[x]
        paths[v] = path
    return build_instance(6, 0, arcs, paths)
