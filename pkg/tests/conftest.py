import numpy as np
import pytest
from hypothesis import settings

from qgeo import Ray, Rng, random_hermitian, random_ray

settings.register_profile("qgeo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("qgeo")

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def rng():
    return Rng(20240611)


def rand_ray(rng, n):
    return Ray(random_ray(rng, n))


def rand_obs(rng, n):
    return random_hermitian(rng, n)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
