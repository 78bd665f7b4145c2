import pytest

from napa import initial_state, load_fixture

_criteria: dict[str, str] = {}


@pytest.fixture(scope="session")
def fw():
    return load_fixture()


@pytest.fixture(scope="session")
def fw_haggle():
    return load_fixture("negotiation_haggle.napa")


@pytest.fixture(scope="session")
def s0(fw):
    return initial_state(fw)


def pytest_runtest_logreport(report):
    # one verdict per acceptance criterion, printed after the run
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        number, _, title = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"{_criteria[name]}  criterion {int(number):2d}: {title.replace('_', ' ')}")
