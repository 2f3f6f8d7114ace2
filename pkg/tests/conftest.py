import os

# must happen before numba is imported anywhere
os.environ.setdefault("NUMBA_NUM_THREADS", "4")

import time  # noqa: E402

import pytest  # noqa: E402

from sortnet.generate import generate_up_to  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


class Run:
    def __init__(self, n, k, variant, workers):
        t0 = time.perf_counter()
        pairs = list(generate_up_to(n, k, variant, workers))
        self.elapsed = time.perf_counter() - t0
        self.levels = {lv.k: lv for lv, _ in pairs}
        self.stats = {lv.k: st for lv, st in pairs}

    def sizes(self, ks):
        return [len(self.levels[k]) for k in ks]


_RUNS: dict = {}


@pytest.fixture(scope="session")
def generation():
    """Memoized ``generate_up_to`` runs shared across test modules."""

    def get(n, k, variant="matching", workers=4):
        key = (n, k, variant, workers)
        if key not in _RUNS:
            _RUNS[key] = Run(n, k, variant, workers)
        return _RUNS[key]

    return get


@pytest.fixture(scope="session")
def report():
    def emit(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
