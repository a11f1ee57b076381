"""
Discrete Gabor frames built from compactly supported windows.

For a window ``g`` supported in ``[a, a + tau]`` and a translation step
``0 < T <= tau`` the periodisation

    H(t) = tau * sum_n |g(t - n T)|**2

controls the frame ``{g_{omega_m, s_n}}`` with ``omega_m = 2 pi m / tau`` and
``s_n = n T``: its frame bounds are ``min H`` and ``max H``, the frame
operator is multiplication by ``H`` and ``f = H**-1 sum g_{m,n} <g_{m,n}, f>``.
On a grid these identities are exact when ``tau`` and ``T`` are multiples of
``dt`` and the modulation indices cover the Nyquist band once.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .signal_core import DomainError, Grid, SampledSignal
from .weyl_heisenberg import TimeFreqPoint

__all__ = [
    "FrameConditionError",
    "GridAlignmentWarning",
    "LatticeSpec",
    "GaborFrame",
    "BoundsReport",
    "nyquist_m_range",
    "lattice_points",
    "make_frame",
    "representable",
    "atom_matrix",
    "periodization",
    "bounds_from_periodization",
    "tighten_window",
    "analyze",
    "synthesize_compact",
    "frame_operator",
    "coverage_subspace",
    "frame_bounds_eigen",
]

H_FLOOR = 1e-12


class FrameConditionError(DomainError):
    """The periodisation (or frame operator) vanishes somewhere: no lower bound."""


class GridAlignmentWarning(UserWarning):
    """``tau`` or ``T`` is not a multiple of the grid spacing."""


def _aligned(x: float, dt: float) -> bool:
    k = round(x / dt)
    return k > 0 and abs(x - k * dt) <= 1e-9 * dt


def _warn_alignment(grid: Grid, **lengths):
    bad = [name for name, x in lengths.items() if not _aligned(x, grid.dt)]
    if bad:
        warnings.warn(
            f"{', '.join(bad)} not a multiple of dt={grid.dt:.6g}; "
            "discrete identities hold only approximately",
            GridAlignmentWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class LatticeSpec:
    """``omega_m = 2 pi m / tau`` for ``m`` in ``m_range``, ``s_n = n T`` for ``n`` in ``n_range``.

    Ranges are inclusive ``(lo, hi)`` pairs.
    """

    tau: float
    T: float
    m_range: tuple[int, int]
    n_range: tuple[int, int]

    def __post_init__(self):
        if not (self.tau > 0 and self.T > 0):
            raise DomainError("tau and T must be positive")
        if self.T > self.tau * (1 + 1e-12):
            raise DomainError(f"need T <= tau, got T={self.T}, tau={self.tau}")
        for name in ("m_range", "n_range"):
            lo, hi = getattr(self, name)
            if int(lo) != lo or int(hi) != hi or lo > hi:
                raise DomainError(f"{name} must be an integer interval lo <= hi")
            object.__setattr__(self, name, (int(lo), int(hi)))

    def indices(self) -> list[tuple[int, int]]:
        """``(m, n)`` pairs in lattice order: ``n`` outer, ``m`` inner."""
        return [
            (m, n)
            for n in range(self.n_range[0], self.n_range[1] + 1)
            for m in range(self.m_range[0], self.m_range[1] + 1)
        ]


def nyquist_m_range(grid: Grid, tau: float) -> tuple[int, int]:
    """Modulation indices with ``-pi/dt <= 2 pi m / tau < pi/dt``: each grid frequency once."""
    half = tau / (2.0 * grid.dt)
    lo = math.ceil(-half - 1e-9)
    hi = math.ceil(half - 1e-9) - 1
    return lo, hi


def lattice_points(spec: LatticeSpec) -> list[TimeFreqPoint]:
    return [TimeFreqPoint(2.0 * math.pi * m / spec.tau, n * spec.T) for m, n in spec.indices()]


@dataclass(frozen=True, eq=False)
class GaborFrame:
    window: SampledSignal
    lattice: tuple
    spec: Optional[LatticeSpec] = None
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        lattice = tuple(p if isinstance(p, TimeFreqPoint) else TimeFreqPoint(*p) for p in self.lattice)
        if not lattice:
            raise DomainError("a frame needs at least one lattice point")
        # tightened windows have norm**2 = T/tau, so only a nonzero norm is required
        if not np.any(self.window.values):
            raise DomainError("frame window is identically zero")
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def grid(self) -> Grid:
        return self.window.grid

    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.lattice])

    def shifts(self) -> np.ndarray:
        return np.array([p.s for p in self.lattice])


def make_frame(
    window: SampledSignal,
    spec: Optional[LatticeSpec] = None,
    points: Optional[Iterable] = None,
    **provenance,
) -> GaborFrame:
    """Frame from a lattice spec (``omega_m = 2 pi m/tau``, ``s_n = nT``) or explicit points."""
    if (spec is None) == (points is None):
        raise DomainError("give exactly one of spec or points")
    if spec is not None:
        _warn_alignment(window.grid, tau=spec.tau, T=spec.T)
        return GaborFrame(window, tuple(lattice_points(spec)), spec, provenance)
    return GaborFrame(window, tuple(points), None, provenance)


def representable(points: Sequence[TimeFreqPoint], grid: Grid) -> np.ndarray:
    """
    Mask of labels inside the grid's time-frequency cell
    ``[-pi/dt, pi/dt) x [t0, t0 + n dt)``.

    Outside it, a sampled atom is an alias of some other atom, not the
    continuum one.
    """
    om = np.array([p.omega for p in points])
    s = np.array([p.s for p in points])
    return (
        (om >= -grid.nyquist)
        & (om < grid.nyquist)
        & (s >= grid.t0 - 0.5 * grid.dt)
        & (s < grid.t0 + grid.span - 0.5 * grid.dt)
    )


def atom_matrix(window: SampledSignal, points: Sequence[TimeFreqPoint]) -> np.ndarray:
    """Rows are the sampled atoms ``U(omega) V(s) window``, in ``points`` order.

    Translations follow :func:`~gabor_deform.weyl_heisenberg.translate`:
    index rolls for grid multiples, spectral phase ramps otherwise.
    """
    grid = window.grid
    t = grid.times
    om = np.array([p.omega for p in points], dtype=float)
    s = np.array([p.s for p in points], dtype=float)
    rows = np.empty((len(points), grid.n), dtype=np.complex128)

    spectrum = np.fft.fft(window.values)
    nu = grid.frequencies()
    shifted = {}
    for i, si in enumerate(s):
        if si not in shifted:
            k = grid.steps(si)
            if k is not None:
                shifted[si] = np.roll(window.values, k)
            else:
                shifted[si] = np.fft.ifft(np.exp(-1j * nu * si) * spectrum)
        rows[i] = shifted[si]
    rows *= np.exp(1j * om[:, None] * t[None, :])
    return rows


def _shift_zero_extended(values: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    # g(t - s) with g taken as zero off the grid (no wrap-around)
    k = grid.steps(s)
    n = grid.n
    out = np.zeros(n, dtype=np.complex128)
    if k is not None:
        if abs(k) < n:
            if k >= 0:
                out[k:] = values[: n - k]
            else:
                out[:k] = values[-k:]
        return out
    pad = np.concatenate([values, np.zeros(n, dtype=np.complex128)])
    nu = 2.0 * np.pi * np.fft.fftfreq(2 * n, d=grid.dt)
    moved = np.fft.ifft(np.exp(-1j * nu * s) * np.fft.fft(pad))
    return moved[:n]


def _support(g: SampledSignal) -> tuple[int, int]:
    nz = np.flatnonzero(np.abs(g.values) > 1e-14)
    if nz.size == 0:
        raise DomainError("window is identically zero")
    return int(nz[0]), int(nz[-1])


def _periodization_full(g: SampledSignal, T: float, tau: float) -> np.ndarray:
    grid = g.grid
    lo, hi = _support(g)
    if lo == 0 or hi == grid.n - 1:
        raise DomainError("window support touches the grid edge; it is not compactly supported")
    n_max = math.ceil(grid.span / T) + 1
    power = np.zeros(grid.n)
    for k in range(-n_max, n_max + 1):
        power += np.abs(_shift_zero_extended(g.values, grid, k * T)) ** 2
    return tau * power


def periodization(g: SampledSignal, T: float, tau: float, full: bool = False) -> SampledSignal:
    """
    ``H(t) = tau * sum_n |g(t - nT)|**2``.

    By default returns one period, the samples with ``0 <= t < T``, as a
    signal on its own sub-grid.  With ``full=True`` returns ``H`` on the whole
    grid of ``g`` (exact wherever every contributing translate of ``g`` lies
    on the grid).
    """
    if not (T > 0 and tau > 0):
        raise DomainError("T and tau must be positive")
    grid = g.grid
    _warn_alignment(grid, T=T, tau=tau)
    h = _periodization_full(g, T, tau)
    if full:
        return SampledSignal(grid, h, {"T": T, "tau": tau})
    t = grid.times
    idx = np.flatnonzero((t >= -1e-12 * grid.dt) & (t < T - 1e-12 * grid.dt))
    if idx.size == 0:
        raise DomainError("grid has no samples in [0, T)")
    sub = Grid(max(idx.size, 2), grid.dt, float(t[idx[0]]))
    if idx.size == 1:  # a period shorter than dt still needs a 2-point grid
        idx = np.array([idx[0], (idx[0] + 1) % grid.n])
    return SampledSignal(sub, h[idx], {"T": T, "tau": tau})


@dataclass(frozen=True)
class BoundsReport:
    a: float
    b: float
    method: str
    tolerance: float
    dimension: int

    def __post_init__(self):
        if not (0 < self.a <= self.b * (1 + 1e-12)):
            raise FrameConditionError(f"invalid frame bounds a={self.a!r}, b={self.b!r}")
        if self.method not in ("periodization", "eigen"):
            raise DomainError(f"unknown bounds method {self.method!r}")

    @property
    def ratio(self) -> float:
        return self.b / self.a

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "method": self.method,
            "tolerance": self.tolerance,
            "dimension": self.dimension,
        }


def bounds_from_periodization(h: SampledSignal) -> BoundsReport:
    """``A = min H``, ``B = max H``; raises :class:`FrameConditionError` if ``min H <= 1e-12``."""
    vals = h.values.real
    a, b = float(vals.min()), float(vals.max())
    if a <= H_FLOOR:
        raise FrameConditionError(f"periodization drops to {a:.3g}: no positive lower frame bound")
    return BoundsReport(a, b, "periodization", H_FLOOR, h.grid.n)


def tighten_window(g: SampledSignal, T: float, tau: float) -> SampledSignal:
    """
    ``h = H**(-1/2) g``, whose periodisation is identically 1.

    Raises :class:`FrameConditionError` if ``H`` vanishes anywhere in a period.
    """
    bounds_from_periodization(periodization(g, T, tau))
    h_full = periodization(g, T, tau, full=True)
    lo, hi = _support(g)
    on_support = h_full.values.real[lo : hi + 1]
    if on_support.min() <= H_FLOOR:
        raise FrameConditionError("periodization vanishes on the window support")
    out = np.zeros(g.grid.n, dtype=np.complex128)
    out[lo : hi + 1] = g.values[lo : hi + 1] / np.sqrt(on_support)
    return SampledSignal(g.grid, out, {"tightened": True, "T": T, "tau": tau})


def analyze(frame: GaborFrame, f: SampledSignal) -> dict:
    """Coefficients ``<g_p, f>`` for each lattice point ``p``, in lattice order."""
    if f.grid != frame.grid:
        raise DomainError("signal and frame window live on different grids")
    rows = atom_matrix(frame.window, frame.lattice)
    coeffs = f.grid.dt * (rows.conj() @ f.values)
    return dict(zip(frame.lattice, coeffs.tolist()))


def _coeff_vector(frame: GaborFrame, coeffs: Mapping) -> np.ndarray:
    try:
        return np.array([coeffs[p] for p in frame.lattice], dtype=np.complex128)
    except KeyError as exc:
        raise DomainError(f"no coefficient for lattice point {exc.args[0]}") from None


def _synthesis_sum(frame: GaborFrame, c: np.ndarray) -> np.ndarray:
    return atom_matrix(frame.window, frame.lattice).T @ c


def synthesize_compact(frame: GaborFrame, coeffs: Mapping) -> SampledSignal:
    """
    ``f = C * H**-1 * sum_p g_p c_p`` for a lattice-spec frame.

    The normalisation ``C`` is calibrated once from an impulse at the centre
    of the well-covered region; its analytic value is 1 (``H`` already
    carries the factor ``tau``).  The calibrated value and any deviation from
    1 are stored in ``result.meta``.  ``H**-1`` is applied only where the
    periodisation exceeds ``1e-12``.
    """
    spec = frame.spec
    if spec is None:
        raise DomainError("synthesize_compact needs a frame built from a LatticeSpec")
    grid = frame.grid
    lo_m, hi_m = nyquist_m_range(grid, spec.tau)
    meta = {}
    if spec.m_range[0] > lo_m or spec.m_range[1] < hi_m:
        meta["m_range_truncated"] = True
        warnings.warn("m_range does not cover the Nyquist band; reconstruction is approximate")

    h = periodization(frame.window, spec.T, spec.tau, full=True).values.real
    mask = h > H_FLOOR
    if not mask.any():
        raise FrameConditionError("periodization vanishes everywhere")

    # calibration impulse: covered sample nearest the middle of the lattice's time range
    s_mid = 0.5 * (spec.n_range[0] + spec.n_range[1]) * spec.T
    window_mid = np.dot(grid.times, np.abs(frame.window.values) ** 2) * grid.dt
    k_ref = int(np.argmin(np.where(mask, np.abs(grid.times - s_mid - window_mid), np.inf)))
    delta = np.zeros(grid.n, dtype=np.complex128)
    delta[k_ref] = 1.0 / grid.dt
    rows = atom_matrix(frame.window, frame.lattice)
    c_ref = grid.dt * (rows.conj() @ delta)
    back = (rows.T @ c_ref)[k_ref] / h[k_ref]
    scale = float((1.0 / grid.dt) / back.real)
    meta["normalization"] = scale
    meta["normalization_deviation"] = abs(scale - 1.0)
    if abs(scale - 1.0) > 1e-10:
        warnings.warn(
            f"calibrated reconstruction constant {scale!r} differs from the analytic value 1",
            GridAlignmentWarning,
        )

    c = _coeff_vector(frame, coeffs)
    total = rows.T @ c
    out = np.zeros(grid.n, dtype=np.complex128)
    out[mask] = scale * total[mask] / h[mask]
    return SampledSignal(grid, out, meta)


def frame_operator(frame: GaborFrame, points: Optional[Sequence[TimeFreqPoint]] = None) -> np.ndarray:
    """
    Matrix ``S`` with ``S f = sum_p <g_p, f> g_p`` on sample vectors.

    ``points`` overrides the frame's lattice (e.g. a representable subset).
    """
    pts = frame.lattice if points is None else tuple(points)
    if len(pts) == 0:
        raise DomainError("frame operator of an empty lattice")
    rows = atom_matrix(frame.window, pts)
    s = frame.grid.dt * (rows.T @ rows.conj())
    return 0.5 * (s + s.conj().T)


def coverage_subspace(frame: GaborFrame, threshold: float = H_FLOOR) -> np.ndarray:
    """
    Orthonormal basis (columns, ``dt``-weighted) of signals supported where
    ``sum_n |g(t - s_n)|**2 > threshold``.
    """
    grid = frame.grid
    shifts = sorted(set(frame.shifts().tolist()))
    power = np.zeros(grid.n)
    for s in shifts:
        power += np.abs(_shift_zero_extended(frame.window.values, grid, s)) ** 2
    idx = np.flatnonzero(power > threshold)
    if idx.size == 0:
        raise DomainError("frame covers no part of the grid")
    basis = np.zeros((grid.n, idx.size), dtype=np.complex128)
    basis[idx, np.arange(idx.size)] = 1.0 / math.sqrt(grid.dt)
    return basis


def _compress(s: np.ndarray, basis: np.ndarray, dt: float) -> np.ndarray:
    m = dt * (basis.conj().T @ s @ basis)
    return 0.5 * (m + m.conj().T)


def frame_bounds_eigen(
    frame: GaborFrame,
    subspace: Optional[np.ndarray] = None,
    points: Optional[Sequence[TimeFreqPoint]] = None,
) -> BoundsReport:
    """
    Extremal eigenvalues of the frame operator compressed to a subspace.

    ``subspace`` holds ``dt``-orthonormal columns; by default the time
    coverage region of the frame (:func:`coverage_subspace`).  Raises
    :class:`FrameConditionError` if the lower bound is not positive.
    """
    if subspace is None:
        subspace = coverage_subspace(frame)
    if subspace.shape[1] == 0:
        raise DomainError("empty subspace")
    s = frame_operator(frame, points)
    eig = np.linalg.eigvalsh(_compress(s, subspace, frame.grid.dt))
    a, b = float(eig[0]), float(eig[-1])
    if a <= H_FLOOR * max(b, 1.0):
        raise FrameConditionError(f"lower frame bound {a:.3g} is not positive on the subspace")
    return BoundsReport(a, b, "eigen", 1e-10, int(subspace.shape[1]))
