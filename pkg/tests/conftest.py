import pytest

from cubical.spaces import codiscrete, group_nerve

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def codisc2():
    return codiscrete("ab", 3)


@pytest.fixture(scope="session")
def codisc2_4():
    return codiscrete("ab", 4)


@pytest.fixture(scope="session")
def codisc3():
    return codiscrete("abc", 3)


@pytest.fixture(scope="session")
def nerve2():
    return group_nerve(2, 3)


@pytest.fixture(scope="session")
def nerve2_4():
    return group_nerve(2, 4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {k}: {ACCEPTANCE[k]}")
