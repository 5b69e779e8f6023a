import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lascat.dataset import standard_aperture
from lascat.forward import ForwardConfig, far_field_at
from lascat.geometry import Kite, Pear

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def kite_full():
    """Clean kite far field, full observation aperture, one incident wave."""
    return far_field_at(Kite(), ForwardConfig(n_quad=64), (standard_aperture("G1O"), standard_aperture("G1I")))


@pytest.fixture(scope="session")
def pear_full():
    return far_field_at(Pear(), ForwardConfig(n_quad=64), (standard_aperture("G1O"), standard_aperture("G1I")))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    report = getattr(mod, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for n in sorted(report):
            terminalreporter.write_line(report[n])
