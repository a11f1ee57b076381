import math
import warnings

import numpy as np
import pytest

from gabor_deform import (
    DomainError,
    FrameConditionError,
    GaborFrame,
    LatticeSpec,
    SampledSignal,
    TimeFreqPoint,
    WindowSpec,
    analyze,
    bounds_from_periodization,
    frame_bounds_eigen,
    frame_operator,
    gabor_atom,
    hermite_basis,
    inner_product,
    make_frame,
    make_grid,
    norm,
    nyquist_m_range,
    periodization,
    sample_window,
    synthesize_compact,
    tighten_window,
)
from gabor_deform.gabor_frames import (
    BoundsReport,
    GridAlignmentWarning,
    atom_matrix,
    coverage_subspace,
    lattice_points,
    representable,
)

from conftest import central_random, rel_err


@pytest.fixture(scope="module")
def grid():
    # 32 samples per unit time: tau = 1, T = 1/2 and T = 1/4 are all aligned
    return make_grid(256, 1.0 / 32, -4.0)


@pytest.fixture(scope="module")
def rect(grid):
    return sample_window(WindowSpec("rectangular", support_start=-0.5, tau=1.0), grid)


@pytest.fixture(scope="module")
def hann(grid):
    return sample_window(WindowSpec("hann", support_start=-0.5, tau=1.0), grid)


def tiling_frame(window, T=0.5, tau=1.0):
    # translates n*T for n in [-4/T, 4/T) wrap once around the 8-unit circular grid
    grid = window.grid
    k = round(grid.span / (2 * T))
    return make_frame(window, LatticeSpec(tau, T, nyquist_m_range(grid, tau), (-k, k - 1)))


def test_lattice_spec_validation():
    with pytest.raises(DomainError):
        LatticeSpec(1.0, 2.0, (0, 1), (0, 1))
    with pytest.raises(DomainError):
        LatticeSpec(0.0, 0.0, (0, 1), (0, 1))
    spec = LatticeSpec(1.0, 0.5, (-1, 1), (0, 1))
    assert spec.indices() == [(-1, 0), (0, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
    pts = lattice_points(spec)
    assert pts[0] == TimeFreqPoint(-2 * math.pi, 0.0)
    assert pts[-1] == TimeFreqPoint(2 * math.pi, 0.5)


def test_nyquist_range(grid):
    lo, hi = nyquist_m_range(grid, 1.0)
    assert (lo, hi) == (-16, 15)
    assert -grid.nyquist <= 2 * math.pi * lo < 2 * math.pi * hi < grid.nyquist


def test_frame_construction(grid, rect):
    with pytest.raises(DomainError):
        GaborFrame(rect, ())
    with pytest.raises(DomainError):
        GaborFrame(SampledSignal(grid, np.zeros(grid.n)), ((0, 0),))
    with pytest.raises(DomainError):
        make_frame(rect)
    fr = make_frame(rect, points=[(0, 0), (1, 0.5)], source="test")
    assert fr.lattice[1] == TimeFreqPoint(1, 0.5)
    assert fr.provenance == {"source": "test"}
    assert fr.spec is None


def test_misaligned_lattice_warns(grid, rect):
    with pytest.warns(GridAlignmentWarning):
        make_frame(rect, LatticeSpec(1.0, 0.3, (0, 0), (0, 1)))


def test_representable_mask(grid):
    pts = [TimeFreqPoint(0, 0), TimeFreqPoint(grid.nyquist + 1, 0), TimeFreqPoint(0, 10.0)]
    assert representable(pts, grid).tolist() == [True, False, False]


def test_atom_matrix_rows_are_atoms(grid, hann):
    pts = [TimeFreqPoint(2 * math.pi, 0.5), TimeFreqPoint(-4.0, 0.3)]
    rows = atom_matrix(hann, pts)
    for row, p in zip(rows, pts):
        assert rel_err(row, gabor_atom(hann, p).values) < 1e-12


def test_periodization_rectangular(rect):
    h1 = periodization(rect, 1.0, 1.0)
    assert np.allclose(h1.values, 1.0, atol=1e-12)
    assert h1.grid.n == 32 and h1.grid.t0 == 0.0
    h2 = periodization(rect, 0.5, 1.0)
    assert np.allclose(h2.values, 2.0, atol=1e-12)
    assert np.all(h2.values.imag == 0)


def test_periodization_hann(hann):
    # sin^4 translates by tau/4 sum to 3/2; with unit norm this gives H = 4
    h = periodization(hann, 0.25, 1.0)
    assert np.allclose(h.values.real, 4.0, atol=1e-10)
    # by tau/2 they do not: H swings between 4/3 and 8/3
    h = periodization(hann, 0.5, 1.0).values.real
    assert h.min() == pytest.approx(4 / 3, abs=1e-10)
    assert h.max() == pytest.approx(8 / 3, abs=1e-10)


def test_periodization_full_grid(rect):
    h = periodization(rect, 0.5, 1.0, full=True)
    assert h.grid == rect.grid
    assert np.allclose(h.values, 2.0, atol=1e-12)


def test_periodization_rejects_edge_support(grid):
    g = sample_window(WindowSpec("gaussian", width=2.0), grid)
    with pytest.raises(DomainError):
        periodization(g, 0.5, 1.0)
    with pytest.raises(DomainError):
        periodization(g, 0.0, 1.0)


def test_bounds_from_periodization(grid, rect):
    ones = SampledSignal(make_grid(8, 0.1, 0.0), np.ones(8))
    rep = bounds_from_periodization(ones)
    assert (rep.a, rep.b, rep.method) == (1.0, 1.0, "periodization")
    rep = bounds_from_periodization(periodization(rect, 0.5, 1.0))
    assert rep.a == pytest.approx(2.0, abs=1e-12) and rep.b == pytest.approx(2.0, abs=1e-12)
    zero = SampledSignal(make_grid(4, 0.1, 0.0), [1, 0, 1, 1])
    with pytest.raises(FrameConditionError):
        bounds_from_periodization(zero)


def test_bounds_report_validation():
    with pytest.raises(FrameConditionError):
        BoundsReport(2.0, 1.0, "eigen", 0.0, 1)
    with pytest.raises(FrameConditionError):
        BoundsReport(0.0, 1.0, "eigen", 0.0, 1)
    with pytest.raises(DomainError):
        BoundsReport(1.0, 1.0, "magic", 0.0, 1)
    assert BoundsReport(1.0, 3.0, "eigen", 0.0, 1).ratio == 3.0


def test_gap_in_coverage_violates_frame_condition(grid):
    w = sample_window(WindowSpec("rectangular", support_start=0.0, tau=0.5), grid)
    with pytest.raises(FrameConditionError):
        bounds_from_periodization(periodization(w, 1.0, 1.0))
    with pytest.raises(FrameConditionError):
        tighten_window(w, 1.0, 1.0)


def test_tighten_rectangular(rect):
    assert rel_err(tighten_window(rect, 1.0, 1.0), rect) < 1e-12
    h = tighten_window(rect, 0.5, 1.0)
    assert rel_err(h.values, rect.values / math.sqrt(2)) < 1e-12
    assert norm(h) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_tighten_hann(hann):
    for T in (0.5, 0.25):
        h = tighten_window(hann, T, 1.0)
        assert np.allclose(periodization(h, T, 1.0).values.real, 1.0, atol=1e-10)
        assert norm(h) ** 2 == pytest.approx(T, abs=1e-10)
        # idempotent
        assert rel_err(tighten_window(h, T, 1.0), h) < 1e-10


def test_analyze_self_coefficient(grid, hann):
    fr = make_frame(hann, points=[(0, 0), (2 * math.pi, 0.5)])
    coeffs = analyze(fr, hann)
    assert coeffs[TimeFreqPoint(0, 0)] == pytest.approx(1.0, abs=1e-10)
    p = TimeFreqPoint(2 * math.pi, 0.5)
    assert coeffs[p] == pytest.approx(inner_product(gabor_atom(hann, p), hann), abs=1e-14)


def test_analyze_orthogonal_signal(grid, rect):
    # signal living where no atom reaches
    fr = make_frame(rect, points=[(0, 0), (0, 0.5)])
    v = np.zeros(grid.n)
    v[(grid.times > 2.0) & (grid.times < 3.0)] = 1.0
    assert all(abs(c) == 0 for c in analyze(fr, SampledSignal(grid, v)).values())


def test_analyze_grid_mismatch(rect):
    fr = make_frame(rect, points=[(0, 0)])
    with pytest.raises(DomainError):
        analyze(fr, SampledSignal(make_grid(8, 1.0, 0.0), np.ones(8)))


def test_round_trip_tight_rectangular(rect, rng):
    fr = tiling_frame(tighten_window(rect, 0.5, 1.0))
    f = central_random(rect.grid, rng, 0.2, 0.8)
    out = synthesize_compact(fr, analyze(fr, f))
    assert rel_err(out, f) < 1e-8
    assert out.meta["normalization_deviation"] < 1e-10


def test_round_trip_untightened_hann(hann, rng):
    fr = tiling_frame(hann, T=0.25)
    f = central_random(hann.grid, rng, 0.2, 0.8)
    assert rel_err(synthesize_compact(fr, analyze(fr, f)), f) < 1e-8


def test_round_trip_single_atom(rect):
    h = tighten_window(rect, 0.5, 1.0)
    fr = tiling_frame(h)
    f = gabor_atom(h, TimeFreqPoint(2 * math.pi * 3, 0.5))
    assert rel_err(synthesize_compact(fr, analyze(fr, f)), f) < 1e-8


def test_truncated_m_range_degrades_monotonically(rect, rng):
    h = tighten_window(rect, 0.5, 1.0)
    f = central_random(rect.grid, rng, 0.2, 0.8)
    errors = []
    for half in (16, 12, 8, 4):
        fr = make_frame(h, LatticeSpec(1.0, 0.5, (-half, half - 1), (-8, 7)))
        coeffs = analyze(fr, f)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = synthesize_compact(fr, coeffs)
        errors.append(rel_err(out, f))
        if half < 16:
            assert out.meta["m_range_truncated"]
    assert errors[0] < 1e-8
    assert all(a < b for a, b in zip(errors, errors[1:]))


def test_synthesize_needs_lattice_spec(rect):
    fr = make_frame(rect, points=[(0, 0)])
    with pytest.raises(DomainError):
        synthesize_compact(fr, {TimeFreqPoint(0, 0): 1.0})


def test_synthesize_missing_coefficient(rect):
    fr = tiling_frame(rect)
    with pytest.raises(DomainError):
        synthesize_compact(fr, {})


def test_frame_operator_single_atom(hann):
    fr = make_frame(hann, points=[(0, 0)])
    s = frame_operator(fr)
    assert np.abs(s - s.conj().T).max() < 1e-12
    eig = np.linalg.eigvalsh(s)
    assert eig[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.sum(eig > 1e-10) == 1


def test_frame_operator_tight_is_identity(rect):
    fr = tiling_frame(tighten_window(rect, 0.5, 1.0))
    s = frame_operator(fr)
    assert np.abs(s - np.eye(s.shape[0])).max() < 1e-6


def test_frame_operator_positive_semidefinite(hann):
    fr = make_frame(hann, LatticeSpec(1.0, 0.5, (-4, 4), (-3, 3)))
    assert np.linalg.eigvalsh(frame_operator(fr))[0] >= -1e-10
    with pytest.raises(DomainError):
        frame_operator(fr, points=[])


def test_eigen_bounds_tight(rect):
    rep = frame_bounds_eigen(tiling_frame(tighten_window(rect, 0.5, 1.0)))
    assert rep.method == "eigen"
    assert rep.b / rep.a - 1 < 0.01
    assert rep.a == pytest.approx(1.0, abs=1e-10)


def test_eigen_bounds_single_atom_on_its_span(hann):
    fr = make_frame(hann, points=[(0, 0)])
    span = hann.values[:, None]  # unit dt-norm column
    rep = frame_bounds_eigen(fr, subspace=span)
    assert rep.a == pytest.approx(1.0, abs=1e-12) and rep.b == pytest.approx(1.0, abs=1e-12)
    assert rep.dimension == 1
    # on the full coverage region a single atom is no frame
    with pytest.raises(FrameConditionError):
        frame_bounds_eigen(fr)


@pytest.mark.filterwarnings("ignore::gabor_deform.fractional_fourier.TurningPointWarning")
def test_removing_points_lowers_bounds(grid):
    g = sample_window(WindowSpec("gaussian", width=0.5), grid)
    fr = make_frame(g, LatticeSpec(1.0, 0.5, nyquist_m_range(grid, 1.0), (-8, 7)))
    sub = hermite_basis(grid, 8).vectors
    full = frame_bounds_eigen(fr, sub)
    half = [p for p, (m, n) in zip(fr.lattice, fr.spec.indices()) if n % 2 == 0]
    fewer = frame_bounds_eigen(fr, sub, points=half)
    assert fewer.a < full.a
    assert fewer.b <= full.b * (1 + 1e-12)


def test_frame_inequality_on_random_signals(hann, rng):
    fr = make_frame(hann, LatticeSpec(1.0, 0.5, nyquist_m_range(hann.grid, 1.0), (-4, 4)))
    sub = coverage_subspace(fr)
    rep = frame_bounds_eigen(fr, sub)
    for _ in range(50):
        c = rng.standard_normal(sub.shape[1]) + 1j * rng.standard_normal(sub.shape[1])
        f = SampledSignal(hann.grid, sub @ c)
        energy = sum(abs(v) ** 2 for v in analyze(fr, f).values())
        n2 = norm(f) ** 2
        assert rep.a * n2 * (1 - 1e-9) <= energy <= rep.b * n2 * (1 + 1e-9)


@pytest.mark.parametrize("T", [0.5, 0.25])
def test_periodization_and_eigen_bounds_agree(hann, T):
    fr = tiling_frame(hann, T=T)
    per = bounds_from_periodization(periodization(hann, T, 1.0))
    eig = frame_bounds_eigen(fr)
    assert eig.a == pytest.approx(per.a, rel=0.02)
    assert eig.b == pytest.approx(per.b, rel=0.02)
