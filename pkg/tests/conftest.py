import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"

# One-line verdicts accumulated by the acceptance tests and echoed at the
# end of the run so they are visible even when every test passes.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def h2_fcidump():
    return str(DATA / "h2_sto6g.fcidump")


@pytest.fixture(scope="session")
def h6_fcidump():
    return str(DATA / "h6_sto6g_r2.0.fcidump")
