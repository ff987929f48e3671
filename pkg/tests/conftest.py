import pytest

from bnquintic.arith import PrimeField

ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture(scope="session")
def fields():
    cache = {}

    def get(p):
        if p not in cache:
            cache[p] = PrimeField(p)
        return cache[p]

    return get


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in sorted(ACCEPTANCE_RESULTS.items()):
        terminalreporter.write_line(f"{status}  {name}")
