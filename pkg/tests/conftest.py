import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_RESULTS: dict[int, tuple[bool, str]] = {}


class Recorder:
    def __call__(self, criterion: int, ok: bool, detail: str = "") -> bool:
        prev = _RESULTS.get(criterion)
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(x for x in (prev[1], detail) if x)
        _RESULTS[criterion] = (bool(ok), detail)
        return bool(ok)


@pytest.fixture(scope="session")
def acceptance():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        ok, detail = _RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
