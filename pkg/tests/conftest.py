import pytest

from bmgame.instance import make_instance, random_suite

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(label, ok, detail)."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        _CRITERIA.append((label, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def suite():
    return random_suite(200, seed=2024)


@pytest.fixture(scope="session")
def bipartite_suite():
    return random_suite(100, seed=7, bipartite=True)


@pytest.fixture
def triangle():
    return make_instance({1: 1, 2: 1, 3: 1}, [(1, 2, 1), (2, 3, 1), (1, 3, 1)], name="triangle")


@pytest.fixture
def single_edge():
    return make_instance({1: 1, 2: 1}, [(1, 2, 5)])


@pytest.fixture
def path34():
    return make_instance({"u": 1, "v": 1, "w": 1}, [("u", "v", 3), ("v", "w", 4)])


def cycle(l: int, b: int, w: int = 1):
    return make_instance({k: b for k in range(l)}, [(k, (k + 1) % l, w) for k in range(l)])
