import math

import pytest

from cosine_switch import DesignSpec, SquidModel, characteristic_impedance, reference_device, synthesize
from cosine_switch.core import PHI0

L_LINE = 0.28e-9
C_LINE = 300e-15
# line junction critical current implied by L = Phi0 / (2 pi Ic)
IC_LINE = PHI0 / (2.0 * math.pi * L_LINE)


@pytest.fixture
def device():
    return reference_device()


@pytest.fixture
def design():
    """Coupling inductance that puts chi*N = pi/2 at 6 GHz on the reference device."""
    return synthesize(DesignSpec(6e9, math.sqrt(L_LINE / C_LINE), n_units=24, line_inductance=L_LINE))


@pytest.fixture
def matched_z0(design):
    return characteristic_impedance(L_LINE, C_LINE, design.coupling_inductance)


@pytest.fixture
def tunable_squid():
    # two junctions of 5 Ic each: the SQUID carries 10x the line-junction current
    return SquidModel(5.0 * IC_LINE, asymmetry=0.02, self_capacitance=1e-12)


@pytest.fixture
def tunable_device():
    return reference_device(squid_self_capacitance=1e-12)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{key}] {detail}")
