import time
from contextlib import contextmanager

import pytest

_RESULTS = []


class _Recorder:
    def __init__(self):
        self.detail = ""

    @contextmanager
    def __call__(self, number, title):
        start = time.perf_counter()
        self.detail = ""
        try:
            yield self
        except BaseException:
            _RESULTS.append((number, "FAIL", title, time.perf_counter() - start, self.detail))
            raise
        _RESULTS.append((number, "PASS", title, time.perf_counter() - start, self.detail))


@pytest.fixture
def criterion():
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, elapsed, detail in sorted(_RESULTS):
        line = f"{status} criterion {number:>2}: {title} [{elapsed:.2f} s]"
        if detail:
            line += f" {detail}"
        terminalreporter.write_line(line)
