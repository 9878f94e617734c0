import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if corpus.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in corpus.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
