import math
import os

import numpy as np
import pytest

from schemas.geometry import RadialDomain, PolarGrid, Field


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    test_env_vars = {
        'LOG_LEVEL': 'WARNING',
        'SCENARIO_TOL': '1e-3',
        'MIN_WINDOW_SNAPSHOTS': '5',
    }

    original_values = {}
    for key in list(test_env_vars.keys()) + ['ROTASYM_OUT']:
        if key in os.environ:
            original_values[key] = os.environ[key]

    os.environ.pop('ROTASYM_OUT', None)
    for key, value in test_env_vars.items():
        os.environ[key] = value

    yield

    for key in list(test_env_vars.keys()) + ['ROTASYM_OUT']:
        if key in original_values:
            os.environ[key] = original_values[key]
        else:
            os.environ.pop(key, None)


@pytest.fixture()
def disk_grid() -> PolarGrid:
    return PolarGrid(domain=RadialDomain.disk(1.0), nr=16, ntheta=32)


@pytest.fixture()
def annulus_grid() -> PolarGrid:
    return PolarGrid(domain=RadialDomain.annulus(0.5, 1.0), nr=8, ntheta=32)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture()
def cos_field(disk_grid) -> Field:
    """r (1 - r) cos(phi): even about phi = 0 and dominant towards +x."""
    r, phi = disk_grid.mesh()
    return Field(grid=disk_grid, values=r * (1.0 - r) * np.cos(phi), t=0.0)


@pytest.fixture()
def radial_field(disk_grid) -> Field:
    r, _ = disk_grid.mesh()
    return Field(grid=disk_grid, values=np.cos(0.5 * math.pi * r), t=0.0)
