import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from dqs import gen_cube, gen_torus  # noqa: E402
from dqs.coverings import gen_cube_double_cover  # noqa: E402


@pytest.fixture(scope="session")
def cube():
    return gen_cube()


@pytest.fixture(scope="session")
def torus44():
    return gen_torus(4, 4, 1j)


@pytest.fixture(scope="session")
def torus46():
    return gen_torus(4, 6, 0.3 + 1.2j)


@pytest.fixture(scope="session")
def cube_cover():
    return gen_cube_double_cover()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
