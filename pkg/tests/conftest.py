"""Shared test configuration: hypothesis profile and acceptance summary."""

from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

_criteria: list[tuple[str, bool, str]] = []


def record_criterion(label: str, passed: bool, detail: str = "") -> None:
    """Register one acceptance-criterion outcome for the end-of-run table."""
    _criteria.append((label, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, passed, detail in _criteria:
        status = "PASS" if passed else "FAIL"
        line = f"criterion {label}: {status}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
