import numpy as np
import pytest

from tunneltime import EvolutionSetup, evolve, make_rectangular, transmission_amplitudes


@pytest.fixture(scope="session")
def rect():
    return make_rectangular(1.0, 2.0)


@pytest.fixture(scope="session")
def rect_amps(rect):
    return transmission_amplitudes(rect, 1.0, np.linspace(0.5, 1.5, 2001))


@pytest.fixture(scope="session")
def rect_oracle_run(rect):
    """Split-operator run at dp0 / p0 = 0.02, shared by the oracle checks (about 25 s)."""
    setup = EvolutionSetup.auto(rect, 1.0, -201.0, 25.0, 422.1, dx=0.125, dt=0.0125)
    return setup, evolve(setup, track_norm=True)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def _report(number: int, name: str, ok: bool, detail: str):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
