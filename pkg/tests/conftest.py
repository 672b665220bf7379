from __future__ import annotations

import pytest

# (criterion, passed, note) lines collected by the acceptance suite
CRITERIA: list[tuple[int, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion.

    Usage: ``with criterion(3, "borda refutation"): ...``; the block's
    assertions decide the outcome and any exception is re-raised.
    """
    class _Recorder:
        def __call__(self, number, label):
            self.number, self.label = number, label
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            CRITERIA.append((self.number, exc_type is None, self.label))
            return False

    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, label in sorted(CRITERIA, key=lambda c: (c[0], c[2])):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {label}")
