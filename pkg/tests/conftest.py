"""Shared fixtures and the acceptance summary hook."""
import numpy as np
import pytest

import dispwave as dw

_ACCEPTANCE_LINES = []


class Criterion:
    """Collects subchecks for one acceptance criterion.

    Used as a context manager; on exit it registers a single summary
    line (printed after the test session) and fails the test if any
    subcheck failed or the body raised.
    """

    def __init__(self, number, label):
        self.number = number
        self.label = label
        self.failures = []
        self.notes = []

    def check(self, ok, message):
        if not ok:
            self.failures.append(message)

    def note(self, message):
        self.notes.append(message)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None:
            self.failures.append(f"raised {exc_type.__name__}: {exc}")
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.notes + self.failures)
        _ACCEPTANCE_LINES.append((self.number, status, self.label, detail))
        if self.failures and exc is None:
            pytest.fail(f"criterion {self.number}: " + "; ".join(self.failures))
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, status, label, detail in sorted(_ACCEPTANCE_LINES):
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"criterion {number} [{status}] {label}{suffix}")


@pytest.fixture(scope="session")
def whitham_branch():
    """Whitham branch at L=2*pi, N=1024, marched well past its end.

    Shared by the branch-structure and decay-fit acceptance tests; the
    march takes a few seconds so it runs once per session.
    """
    eq = dw.make_equation("whitham", 2 * np.pi)
    bc = dw.HomogeneousB()
    grid = dw.make_grid(eq.length, 1024)
    opts = dw.NavigationOptions(step=0.01)
    branch = dw.bootstrap(eq, bc, grid, waveheight=1e-3, options=opts)
    dw.extend(branch, 90, opts)
    return branch
