import pytest

# Results land here so the summary hook can print one line per criterion
# even when an assert fires mid-test.
_ACCEPTANCE_LINES = []


class AcceptanceLog:
    def record(self, criterion: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append((criterion, passed, detail))


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE_LINES:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {criterion}  [{detail}]")
