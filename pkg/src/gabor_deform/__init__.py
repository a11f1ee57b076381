"""Gabor frames, the harmonic-oscillator rotation group and frame deformations."""

__version__ = "0.1.0"

from .signal_core import (
    DomainError,
    Grid,
    SampledSignal,
    WindowSpec,
    balanced_grid,
    inner_product,
    make_grid,
    norm,
    sample_window,
)
from .weyl_heisenberg import (
    GroupElement,
    TimeFreqPoint,
    apply_group_element,
    bch_check,
    gabor_atom,
    group_compose,
    modulate,
    translate,
)
from .fractional_fourier import (
    HermiteBasis,
    RotationAngle,
    SingularAngleError,
    frft_apply,
    hermite_basis,
    mehler_apply,
    observable_rotation_residual,
    singular_case,
    unitary_dft,
)
from .gabor_frames import (
    BoundsReport,
    FrameConditionError,
    GaborFrame,
    LatticeSpec,
    analyze,
    bounds_from_periodization,
    frame_bounds_eigen,
    frame_operator,
    make_frame,
    nyquist_m_range,
    periodization,
    synthesize_compact,
    tighten_window,
)
from .frame_deformation import (
    DeformedFrame,
    bounds_invariance_report,
    coefficient_identity_residual,
    deform_frame,
    deform_window,
    phase_factor,
    rotate_point,
    theorem1_residual,
)
