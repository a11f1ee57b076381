"""Tighten a rectangular window and reconstruct a signal from its Gabor coefficients."""

import warnings

import numpy as np

from gabor_deform import (
    LatticeSpec, SampledSignal, WindowSpec, analyze, bounds_from_periodization, make_frame,
    make_grid, norm, nyquist_m_range, periodization, sample_window, synthesize_compact,
    tighten_window,
)
from gabor_deform.gabor_frames import GridAlignmentWarning

warnings.simplefilter("ignore", GridAlignmentWarning)

grid = make_grid(512, 1.0 / 64, -4.0)  # tau = 1 and T = 1/2 are whole numbers of samples
tau, T = 1.0, 0.5
g = sample_window(WindowSpec("rectangular", support_start=-0.5, tau=tau), grid)
before = bounds_from_periodization(periodization(g, T, tau))
h = tighten_window(g, T, tau)
after = bounds_from_periodization(periodization(h, T, tau))
print(f"periodization bounds before: [{before.a:.3f}, {before.b:.3f}]")
print(f"periodization bounds after:  [{after.a:.3f}, {after.b:.3f}]")
print(f"|h|^2 = {norm(h) ** 2:.12f} (T/tau = {T / tau})")

k = int(grid.span / (2 * T))
frame = make_frame(h, LatticeSpec(tau, T, nyquist_m_range(grid, tau), (-k, k - 1)))
rng = np.random.default_rng(0)
v = np.zeros(grid.n, dtype=complex)
v[100:400] = rng.standard_normal(300) + 1j * rng.standard_normal(300)
f = SampledSignal(grid, v)
back = synthesize_compact(frame, analyze(frame, f))
print(f"{len(frame.lattice)} atoms, reconstruction rel err {norm(back - f) / norm(f):.2e}")
