import json
import sys
from pathlib import Path

import pytest

REFERENCE_ENTROPY = 287955962967732827663192315245491885249
REFERENCE_DOUBLE = 0.07296271584154868


@pytest.fixture(scope="session")
def golden():
    return json.loads((Path(__file__).parent / "data" / "golden.json").read_text())


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
