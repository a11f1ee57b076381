"""Frame bounds of a Gaussian Gabor frame are unchanged by the rotation group."""

import math
import warnings

from gabor_deform import LatticeSpec, WindowSpec, balanced_grid, bounds_invariance_report, hermite_basis, make_frame, sample_window
from gabor_deform.fractional_fourier import TurningPointWarning
from gabor_deform.gabor_frames import GridAlignmentWarning

warnings.simplefilter("ignore", TurningPointWarning)
warnings.simplefilter("ignore", GridAlignmentWarning)

grid = balanced_grid(256)
basis = hermite_basis(grid, 256)
frame = make_frame(sample_window(WindowSpec("gaussian", width=0.75), grid), LatticeSpec(1.0, 0.5, (-8, 8), (-8, 8)))
for e in bounds_invariance_report(basis, frame, [math.pi / 6, math.pi / 4, math.pi / 2]):
    print(
        f"theta={e['theta']:.4f}: A {e['A_base']:.6f} -> {e['A_theta']:.6f}, "
        f"B {e['B_base']:.6f} -> {e['B_theta']:.6f}, leakage {e['leakage']:.1e}"
    )
