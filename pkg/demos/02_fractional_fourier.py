"""The rotation W(theta) computed two ways, and its special angles."""

import math

import numpy as np

from gabor_deform import SampledSignal, balanced_grid, frft_apply, hermite_basis, mehler_apply, unitary_dft

grid = balanced_grid(256)
basis = hermite_basis(grid, 128)
t = grid.times
f = SampledSignal(grid, np.exp(-((t - 0.4) ** 2) / 1.28 + 1.1j * t))


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


for theta in (math.pi / 6, math.pi / 4, 1.0):
    a = frft_apply(basis, theta, f).values
    b = mehler_apply(theta, f).values
    print(f"theta={theta:.4f}: Hermite vs Mehler rel diff {rel(b, a):.1e}, norm {np.linalg.norm(a) * math.sqrt(grid.dt):.12f}")

quarter = frft_apply(basis, math.pi / 2, f).values
print(f"W(pi/2) vs e^(i pi/4) F: {rel(quarter, np.exp(1j * math.pi / 4) * unitary_dft(f).values):.1e}")
full = frft_apply(basis, 2 * math.pi, f).values
print(f"W(2 pi) vs -identity:   {rel(full, -f.values):.1e}")
