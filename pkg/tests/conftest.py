import pytest

from mabuchi.expr import parse_expression
from mabuchi.grid import SpaceDomain

DERIVED_PSI = "x^2-1+0.1*(1-x^2)^2"


@pytest.fixture(scope="session")
def unit():
    return SpaceDomain.interval(-1.0, 1.0)


@pytest.fixture(scope="session")
def ex3_pair():
    return parse_expression("2*(x^2-1)"), parse_expression("x^2-1")


@pytest.fixture(scope="session")
def derived_pair():
    return parse_expression("x^2-1"), parse_expression(DERIVED_PSI)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
