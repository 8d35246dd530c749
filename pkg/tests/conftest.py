import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def random_lagrangian_frame(rng, n):
    """Image of the horizontal plane under a random symplectic matrix."""
    from maslov.symplin import linear_rotation

    a = rng.standard_normal((n, n))
    s = 0.5 * (a + a.T)
    shear = np.block([[np.eye(n), np.zeros((n, n))], [s, np.eye(n)]])
    rot = linear_rotation(rng.integers(-2, 3, n), rng.uniform())
    b = rng.standard_normal((n, n)) + n * np.eye(n)
    horizontal = np.vstack([b, np.zeros((n, n))])
    return rot @ shear @ horizontal


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
