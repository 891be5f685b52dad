import time

import pytest

from spinsqueeze.cli import main

_ACCEPTANCE = []

SWEEP_J_LIST = "50,100,200,500"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(
            f"criterion {number} [{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        )


@pytest.fixture
def report():
    """Record one acceptance line, then assert it."""

    def _report(number, name, passed, detail):
        _ACCEPTANCE.append((number, name, bool(passed), detail))
        assert passed, f"criterion {number} ({name}) failed: {detail}"

    return _report


@pytest.fixture(scope="session")
def sweep_run(tmp_path_factory):
    """One CLI sweep over J in {50, 100, 200, 500}, shared by several tests.

    Returns (csv path, trace path, elapsed seconds)."""
    out = tmp_path_factory.mktemp("sweep") / "sweep.csv"
    trace = out.with_name("trace.csv")
    started = time.perf_counter()
    rc = main(["sweep", "--j-list", SWEEP_J_LIST, "--out", str(out), "--trace", str(trace)])
    assert rc == 0
    return out, trace, time.perf_counter() - started
