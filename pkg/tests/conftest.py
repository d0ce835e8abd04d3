"""Shared, session-scoped growth profiles (each takes a few seconds)."""

import numpy as np
import pytest

from growthlab.gallery import gallery
from growthlab.growth import build_profile
from growthlab.quadrature import QuadratureSpec

# long grids: polynomial growth only shows a small log F slope far out
TORUS_GRID = np.linspace(0.5, 200.0, 40)
IWASAWA_GRID = np.linspace(0.5, 300.0, 48)
SL2C_GRID = np.linspace(0.5, 12.0, 47)
FS_SHORT_GRID = np.linspace(2.0, 8.0, 25)
FS_LONG_GRID = np.linspace(0.5, 60.0, 48)


@pytest.fixture(scope="session")
def torus_profile():
    return build_profile(gallery("torus", 3), TORUS_GRID)


@pytest.fixture(scope="session")
def iwasawa_profile():
    return build_profile(gallery("iwasawa"), IWASAWA_GRID)


@pytest.fixture(scope="session")
def nakamura_profile():
    return build_profile(gallery("nakamura"), TORUS_GRID)


@pytest.fixture(scope="session")
def sl2c_profile():
    return build_profile(gallery("sl2c"), SL2C_GRID, QuadratureSpec(radial_order=96, polar_order=96))


@pytest.fixture(scope="session")
def fs_short_profile():
    return build_profile(gallery("fubini_study", 3), FS_SHORT_GRID)


@pytest.fixture(scope="session")
def fs_long_profile():
    return build_profile(gallery("fubini_study", 3), FS_LONG_GRID)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
