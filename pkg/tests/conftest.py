import warnings

import numpy as np
import pytest

from gabor_deform import SampledSignal, balanced_grid, hermite_basis, make_grid
from gabor_deform.fractional_fourier import TurningPointWarning


@pytest.fixture(scope="session")
def grid256():
    return balanced_grid(256)


@pytest.fixture(scope="session")
def basis128(grid256):
    return hermite_basis(grid256, 128)


@pytest.fixture(scope="session")
def basis256_full(grid256):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TurningPointWarning)
        return hermite_basis(grid256, 256)


@pytest.fixture(scope="session")
def aligned_grid():
    # tau = 1 and T = 1/2 are both whole numbers of samples
    return make_grid(512, 1.0 / 64, -4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_limited(basis, k, rng):
    """Random combination of the first ``k`` Hermite modes."""
    c = np.zeros(basis.m, dtype=np.complex128)
    c[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return basis.synthesize(c)


def central_random(grid, rng, lo=0.3, hi=0.7):
    v = np.zeros(grid.n, dtype=np.complex128)
    a, b = int(lo * grid.n), int(hi * grid.n)
    v[a:b] = rng.standard_normal(b - a) + 1j * rng.standard_normal(b - a)
    return SampledSignal(grid, v)


def rel_err(a, b):
    a = getattr(a, "values", a)
    b = getattr(b, "values", b)
    return np.linalg.norm(a - b) / np.linalg.norm(b)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE = {}


def record(key, title, ok, detail):
    ACCEPTANCE[key] = (bool(ok), title, detail)
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, title, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key:<4}{title}: {detail}")
