import numpy as np
import pytest

from gridnav.gridmap import parse_map


@pytest.fixture
def grid3():
    return parse_map("000\n010\n000")


@pytest.fixture
def empty3():
    return parse_map("000\n000\n000")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    _ACCEPTANCE.append((marker.args[0], marker.args[1], call.excinfo is None))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}")
