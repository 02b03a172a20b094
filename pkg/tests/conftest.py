import pytest

from linlat.lattice import build_lattice


@pytest.fixture(scope="session")
def L32():
    return build_lattice(3, 2)


@pytest.fixture(scope="session")
def L22():
    return build_lattice(2, 2)


@pytest.fixture(scope="session")
def L42():
    return build_lattice(4, 2)


_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(number, title, ok, detail, elapsed)."""
    results = request.config.stash[_RESULTS]

    def record(number: int, title: str, ok: bool, detail: str, elapsed: float) -> bool:
        results[number] = (title, ok, detail, elapsed)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail, elapsed = results[number]
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {title} ({elapsed:.2f} s): {detail}")
    passed = sum(1 for r in results.values() if r[1])
    terminalreporter.write_line(f"{passed}/{len(results)} criteria pass")
