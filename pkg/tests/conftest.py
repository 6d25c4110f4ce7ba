import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pemdamp import datasets as ds
from pemdamp.beam_modal import BeamAssembly, Patch, assemble_profile, compute_modes, laminate_properties

settings.register_profile("pemdamp", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pemdamp")

#: criterion lines collected by the acceptance tests, shown in the summary
ACCEPTANCE_LINES: dict[int, str] = {}

E_AL, RHO_AL = 68.9e9, 2700.0
E_PZT, RHO_PZT, D31 = 62.0e9, 7800.0, -320e-12


@pytest.fixture(scope="session")
def proto():
    """Measured prototype inputs: (gamma row, capacitances, omega1)."""
    return ds.TABLE1_GAMMA.copy(), ds.TABLE2_CAPACITANCE.copy(), ds.OMEGA1


@pytest.fixture(scope="session")
def uniform_beam():
    geo = ds.TABLE3_GEOMETRY
    k = E_AL * geo["w_b"] * geo["h_b"] ** 3 / 12
    rho = RHO_AL * geo["w_b"] * geo["h_b"]
    return BeamAssembly(geo["l"], k, rho)


def prototype_assembly(with_actuator=True):
    geo = ds.TABLE3_GEOMETRY
    kb, rb, kp, rp, z = laminate_properties(
        E_AL, geo["w_b"], geo["h_b"], RHO_AL, E_PZT, geo["w_p"], geo["h_p"], RHO_PZT
    )
    g = E_PZT * D31 * geo["w_p"] * z
    actuator = Patch(geo["d_a"], geo["l_p"], kp, rp, g) if with_actuator else None
    first = geo["d_a"] + geo["l_p"] + geo["d"]
    return BeamAssembly.uniform_array(
        geo["l"], kb, rb, 5, first, geo["l_p"] + geo["d"], geo["l_p"], kp, rp, g, ds.TABLE2_CAPACITANCE, actuator
    )


@pytest.fixture(scope="session")
def assembly():
    return prototype_assembly()


@pytest.fixture(scope="session")
def basis(assembly):
    return compute_modes(assemble_profile(assembly), 5)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def record_criterion():
    def record(result):
        ACCEPTANCE_LINES[result.number] = result.line()
        print(result.line())
        return result

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
