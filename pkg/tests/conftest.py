import numpy as np
import pytest

from rdslab import _kernels

_CRITERION_LINES = []


@pytest.fixture(scope="session")
def criterion_report():
    """Collect one pass/fail line per acceptance criterion."""

    def record(line: str) -> None:
        _CRITERION_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load from cache) every numba kernel before timing anything."""
    pts = np.empty(2)
    lif = np.empty(2)
    _kernels.orbit_fill(0.1, 0.1, 0.0, 0.0, 1, 0, 1, pts, lif)
    _kernels.rotation_estimate(0.1, 0.1, 0.0, 0.1, 1, 0, 10, 2)
    _kernels.rotation_batch(
        np.array([0.1, 0.2]), np.array([0.0, 0.0]), 0.0,
        np.array([1, 2], dtype=np.uint64), 0.1, 10, 2,
        np.empty(2), np.empty(2),
    )
    _kernels.lyapunov_estimate(0.1, 0.1, 0.05, 0.1, 1, 0, 10, 2)
    _kernels.pdf_counts(0.1, 0.1, 0.05, 0.1, 1, 0, 100, 2, 8)
    _kernels.sync_paths(np.array([0.1, 0.4]), 0.1, 0.05, 0.1, 1, 0, 5)
    _kernels.pullback_run(np.array([0.1, 0.4]), 0.1, 0.05, 0.1, 1, 0, 5)
