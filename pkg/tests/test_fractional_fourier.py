import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gabor_deform import (
    DomainError,
    RotationAngle,
    SampledSignal,
    SingularAngleError,
    WindowSpec,
    balanced_grid,
    frft_apply,
    hermite_basis,
    make_grid,
    mehler_apply,
    norm,
    observable_rotation_residual,
    sample_window,
    singular_case,
    translate,
    unitary_dft,
)
from gabor_deform.fractional_fourier import TurningPointWarning, leakage, reflect

from conftest import random_limited, rel_err


def direct_dft(f):
    # O(n^2) reference: (2 pi)^-1/2 sum_k exp(+i u_j t_k) f_k dt
    t = f.grid.times
    return np.exp(1j * np.outer(t, t)) @ f.values * f.grid.dt / math.sqrt(2 * math.pi)


def gaussian_type(grid, center=0.4, width=0.8, omega=1.1):
    t = grid.times
    return SampledSignal(grid, np.exp(-((t - center) ** 2) / (2 * width**2) + 1j * omega * t))


def test_rotation_angle():
    th = RotationAngle(0.7)
    assert th.alpha**2 + th.beta**2 == pytest.approx(1.0, abs=1e-15)
    assert (th + RotationAngle(0.3)).theta == pytest.approx(1.0)
    assert (-th).theta == -0.7


def test_single_mode_basis(grid256):
    b = hermite_basis(grid256, 1)
    assert norm(b.mode(0)) == pytest.approx(1.0, abs=1e-14)
    expected = np.pi**-0.25 * np.exp(-grid256.times**2 / 2)
    assert rel_err(b.mode(0).values, expected) < 1e-12


def test_basis_gram_identity(grid256):
    b = hermite_basis(grid256, 64)
    assert np.abs(b.gram() - np.eye(64)).max() < 1e-12
    assert np.array_equal(b.eigenvalues, np.arange(64) + 0.5)


def test_full_basis_gram_identity(basis256_full):
    assert np.abs(basis256_full.gram() - np.eye(256)).max() < 1e-12


def test_basis_too_large(grid256):
    with pytest.raises(DomainError):
        hermite_basis(grid256, 300)
    with pytest.raises(DomainError):
        hermite_basis(grid256, 0)


def test_turning_point_warning():
    with pytest.warns(TurningPointWarning):
        hermite_basis(balanced_grid(64), 64)


def test_mode_sign_changes(basis128):
    t = basis128.grid.times
    interior = np.abs(t) < 12
    for k in range(20):
        v = basis128.vectors[interior, k].real
        v = v[np.abs(v) > 1e-10 * np.abs(v).max()]
        assert np.count_nonzero(np.diff(np.sign(v))) == k


def test_frft_identity_and_leakage(grid256, basis128, rng):
    f = random_limited(basis128, 40, rng)
    out = frft_apply(basis128, 0.0, f)
    assert rel_err(out, f) < 1e-12
    assert out.meta["leakage"] < 1e-12

    rect = sample_window(WindowSpec("rectangular", support_start=-0.5, tau=1.0), grid256)
    out = frft_apply(basis128, 0.0, rect)
    assert out.meta["leakage"] > 1e-3
    assert out.meta["leakage"] == pytest.approx(leakage(basis128, rect))


def test_frft_two_pi_on_ground_state(basis128):
    h0 = basis128.mode(0)
    assert rel_err(frft_apply(basis128, 2 * math.pi, h0), -h0) < 1e-10


def test_frft_pi_is_reflection(basis128, rng):
    f = random_limited(basis128, 40, rng)
    expected = 1j * reflect(f).values
    assert rel_err(frft_apply(basis128, math.pi, f).values, expected) < 1e-9


def test_frft_unitary_group_and_period(basis128, rng):
    for _ in range(10):
        f = random_limited(basis128, 48, rng)
        t1, t2 = rng.uniform(-4, 4, size=2)
        g = frft_apply(basis128, t1, f)
        assert norm(g) == pytest.approx(norm(f), rel=1e-12)
        lhs = frft_apply(basis128, t1, frft_apply(basis128, t2, f))
        assert rel_err(lhs, frft_apply(basis128, t1 + t2, f)) < 1e-10
        assert rel_err(frft_apply(basis128, t1 + 2 * math.pi, f), -g) < 1e-10


def test_frft_norm_equals_projection_norm(grid256, basis128, rng):
    v = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    f = SampledSignal(grid256, v)
    g = frft_apply(basis128, 1.234, f)
    assert norm(g) == pytest.approx(norm(basis128.project(f)), rel=1e-12)


def test_unitary_dft_matches_direct_sum(grid256, rng):
    f = SampledSignal(grid256, rng.standard_normal(256) + 1j * rng.standard_normal(256))
    assert rel_err(unitary_dft(f).values, direct_dft(f)) < 1e-12
    assert norm(unitary_dft(f)) == pytest.approx(norm(f), rel=1e-12)


def test_unitary_dft_needs_balanced_grid():
    f = SampledSignal(make_grid(64, 0.1, -3.2), np.ones(64))
    with pytest.raises(DomainError):
        unitary_dft(f)


def test_quarter_turn_is_fourier(grid256, basis128):
    f = basis128.project(gaussian_type(grid256))
    lhs = frft_apply(basis128, math.pi / 2, f)
    assert rel_err(lhs.values, np.exp(1j * math.pi / 4) * unitary_dft(f).values) < 1e-6


def test_singular_case():
    g = balanced_grid(64)
    c = 3 * g.dt
    f = SampledSignal(g, np.exp(-((g.times - c) ** 2)))
    assert rel_err(singular_case(0, f), f) == 0
    assert rel_err(singular_case(2, f), -f) == 0
    even = SampledSignal(g, np.exp(-g.times**2))
    assert rel_err(singular_case(1, even), 1j * even) < 1e-15
    # t -> -t moves the peak from +c to -c
    assert singular_case(1, f).values[np.argmin(abs(g.times + c))] == pytest.approx(1j)


def test_reflect_needs_symmetric_grid():
    f = SampledSignal(make_grid(16, 0.3, -2.0 + 0.1), np.ones(16))
    with pytest.raises(DomainError):
        reflect(f)


def test_mehler_quarter_turn_is_fourier(grid256):
    g = sample_window(WindowSpec("gaussian", width=0.9, center=0.3), grid256)
    expected = np.exp(1j * math.pi / 4) * direct_dft(g)
    assert rel_err(mehler_apply(math.pi / 2, g).values, expected) < 1e-6


def test_mehler_ground_state_phase(basis128):
    h0 = basis128.mode(0)
    out = mehler_apply(math.pi / 4, h0)
    assert rel_err(out.values, np.exp(1j * math.pi / 8) * h0.values) < 1e-6


def test_mehler_refuses_singular_angle(basis128):
    with pytest.raises(SingularAngleError):
        mehler_apply(1e-9, basis128.mode(0))
    with pytest.raises(SingularAngleError):
        mehler_apply(math.pi + 1e-8, basis128.mode(0))


@pytest.mark.parametrize("theta", [0.3, 0.8, math.pi / 4, 1.9, math.pi - 0.3, -1.2, 4.0])
def test_mehler_agrees_with_spectral_route(grid256, basis128, theta):
    f = basis128.project(gaussian_type(grid256))
    assert rel_err(mehler_apply(theta, f), frft_apply(basis128, theta, f)) < 1e-4


def test_mehler_fixed_oversampling_is_coarser(grid256, basis128):
    # without refinement the chirped kernel is under-resolved at small angles
    f = basis128.project(gaussian_type(grid256))
    ref = frft_apply(basis128, 0.3, f)
    assert rel_err(mehler_apply(0.3, f, oversample=1), ref) > 1e-2
    assert mehler_apply(0.3, f).meta["oversample"] > 1


def test_observable_rotation(basis128):
    assert observable_rotation_residual(basis128, 0.0) == (0.0, 0.0)
    assert max(observable_rotation_residual(64, math.pi / 2)) < 1e-10
    assert max(observable_rotation_residual(16, math.pi / 4)) < 1e-10
    with pytest.raises(DomainError):
        observable_rotation_residual(2, 0.1)


def test_spectral_shift_agrees_with_hermite_route(grid256, basis128):
    # W(pi) V(s) W(-pi) = V(-s): a translation conjugated by a half turn
    g = basis128.mode(0)
    lhs = frft_apply(basis128, math.pi, translate(frft_apply(basis128, -math.pi, g), 0.7))
    assert rel_err(lhs, translate(g, -0.7)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.integers(1, 60))
def test_frft_preserves_norm_of_limited_signals(theta, k):
    basis = _basis64()
    rng = np.random.default_rng(k)
    f = random_limited(basis, k, rng)
    assert norm(frft_apply(basis, theta, f)) == pytest.approx(norm(f), rel=1e-12)


_cache = {}


def _basis64():
    if "b" not in _cache:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TurningPointWarning)
            _cache["b"] = hermite_basis(balanced_grid(128), 64)
    return _cache["b"]
