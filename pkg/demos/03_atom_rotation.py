"""A rotated Gabor atom is a phase times an atom of the rotated window at a rotated label."""

import math

from gabor_deform import TimeFreqPoint, balanced_grid, hermite_basis, phase_factor, rotate_point, theorem1_residual

basis = hermite_basis(balanced_grid(256), 128)
h0 = basis.mode(0)
for p in (TimeFreqPoint(1, 0), TimeFreqPoint(0, 1), TimeFreqPoint(2, -1)):
    for theta in (math.pi / 6, math.pi / 3):
        q = rotate_point(p, theta)
        r = theorem1_residual(basis, h0, p, theta)
        bad = theorem1_residual(basis, h0, p, theta, conjugate_phase=True)
        print(
            f"p=({p.omega:+.0f},{p.s:+.0f}) theta={theta:.3f} -> ({q.omega:+.3f},{q.s:+.3f}), "
            f"phase {phase_factor(p, theta):.3f}, residual {r:.1e} (conjugated phase: {bad:.2f})"
        )
