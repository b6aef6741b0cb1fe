import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile (or load cached) numba kernels once so timings exclude it."""
    from adjointforge.adjoint import enumerate_adjoints
    from adjointforge.catalog import catalog
    from adjointforge.derived import derived_matroid, valx_check

    M = catalog("U(2,4)")
    enumerate_adjoints(M)
    derived_matroid(M)
    valx_check(M)
    enumerate_adjoints(catalog("R6"), classify=False)
    return True


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    rows = getattr(mod, "RESULTS", None)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, text in rows:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label:>2s}  {text}")
