import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oscmate.catalog import sampled_catalog_curve
from oscmate.mates import osculating_mate

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# seeds of random_frenet whose torsion keeps one sign on the default window
NONVANISHING_TORSION_SEEDS = (9, 21, 26)


@pytest.fixture(scope="session")
def example17():
    return sampled_catalog_curve("paper_spherical_helix")


@pytest.fixture(scope="session")
def example17_mate(example17):
    return osculating_mate(example17)


@pytest.fixture(scope="session")
def helix():
    return sampled_catalog_curve("circular_helix")


@pytest.fixture(scope="session")
def helix_mate(helix):
    return osculating_mate(helix)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda x: int(x.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
