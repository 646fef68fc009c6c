import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

H2_EQ = 0.7414


@pytest.fixture(scope="session")
def h2_point():
    from qachem.pipeline import ScanSpec, compile_point
    return compile_point(ScanSpec("H2", (H2_EQ,)), H2_EQ)


@pytest.fixture(scope="session")
def h2_mo():
    from qachem.molint import diatomic, integrals, mo_transform, scf_rhf
    ints = integrals(diatomic("H", "H", H2_EQ, "angstrom"))
    scf = scf_rhf(ints, 2)
    return ints, scf, mo_transform(ints, scf.mo_coefficients)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
