import pytest

from padic_periods.padic_base import make_params


@pytest.fixture(scope="session")
def E5():
    return make_params(5, "inert")


@pytest.fixture(scope="session")
def R5():
    return make_params(5, "ramified")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
