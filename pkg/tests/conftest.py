import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import LINES  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num}: {title} -- {detail}")
