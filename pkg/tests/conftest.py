import pytest

ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    """``record(number, title, ok, detail)`` stores one acceptance verdict for the summary."""

    def record(number, title, ok, detail):
        ACCEPTANCE[number] = (title, bool(ok), detail)
        print(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
