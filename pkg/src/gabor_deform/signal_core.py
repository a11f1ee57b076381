"""
Uniform-grid sampled signals.

Everything in the package lives on a :class:`Grid`: ``n`` samples at times
``t_k = t0 + k*dt``.  Integrals are plain Riemann sums with weight ``dt``,
so the discrete modulation and translation operators are exactly unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "Grid",
    "SampledSignal",
    "WindowSpec",
    "make_grid",
    "balanced_grid",
    "inner_product",
    "norm",
    "sample_window",
]


class DomainError(ValueError):
    """Raised when an operation is called outside its mathematical domain."""


@dataclass(frozen=True)
class Grid:
    n: int
    dt: float
    t0: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"grid needs n >= 2 samples, got {self.n!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise DomainError(f"grid spacing must be positive, got {self.dt!r}")
        if not math.isfinite(self.t0):
            raise DomainError("grid origin must be finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n) * self.dt

    @property
    def span(self) -> float:
        """Length ``n*dt`` of the (circular) time interval covered."""
        return self.n * self.dt

    @property
    def t_end(self) -> float:
        """Time of the last sample."""
        return self.t0 + (self.n - 1) * self.dt

    @property
    def nyquist(self) -> float:
        """Largest representable angular frequency, ``pi/dt``."""
        return math.pi / self.dt

    def frequencies(self) -> np.ndarray:
        """Angular frequencies of the DFT bins, in ``numpy.fft`` order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dt)

    def steps(self, s: float) -> Optional[int]:
        """Return ``s/dt`` if it is an integer within 1e-12, else None."""
        k = round(s / self.dt)
        if abs(s - k * self.dt) <= 1e-12 * self.dt:
            return int(k)
        return None

    def is_symmetric(self) -> bool:
        """True if reflection ``t -> -t`` maps the grid to itself circularly."""
        return self.steps(2.0 * self.t0) is not None


def make_grid(n: int, dt: float, t0: float) -> Grid:
    """Construct a grid; raises :class:`DomainError` for ``n < 2`` or ``dt <= 0``."""
    return Grid(n, dt, t0)


def balanced_grid(n: int) -> Grid:
    """
    Grid with ``dt = sqrt(2*pi/n)`` and ``t0 = -(n/2)*dt``.

    The unitary DFT maps this grid onto itself (frequency spacing equals
    ``dt``), so sampled Fourier transforms can be compared pointwise.
    """
    dt = math.sqrt(2.0 * math.pi / n)
    return Grid(n, dt, -(n // 2) * dt)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex samples on a grid.  ``meta`` carries diagnostics such as leakage."""

    grid: Grid
    values: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n,):
            raise DomainError(
                f"expected {self.grid.n} samples, got array of shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def with_values(self, values, **meta) -> "SampledSignal":
        return SampledSignal(self.grid, values, meta)

    def __neg__(self):
        return self.with_values(-self.values)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * complex(scalar))

    __rmul__ = __mul__

    def __len__(self):
        return self.grid.n


def _check_same_grid(f: SampledSignal, g: SampledSignal):
    if f.grid != g.grid:
        raise DomainError(f"grid mismatch: {f.grid} vs {g.grid}")


def inner_product(f: SampledSignal, g: SampledSignal) -> complex:
    """``dt * sum(conj(f) * g)``; conjugate-linear in the first argument."""
    _check_same_grid(f, g)
    return complex(f.grid.dt * np.vdot(f.values, g.values))


def norm(f: SampledSignal) -> float:
    return math.sqrt(f.grid.dt) * float(np.linalg.norm(f.values))


_WINDOW_KINDS = ("rectangular", "hann", "gaussian", "custom")


@dataclass(frozen=True)
class WindowSpec:
    """
    Description of a window before sampling.

    ``rectangular`` and ``hann`` live on ``[support_start, support_start + tau)``;
    ``gaussian`` is ``exp(-(t - center)**2 / (2*width**2))``; ``custom`` takes
    explicit ``samples``, one per grid point.
    """

    kind: str
    support_start: float = 0.0
    tau: float = 1.0
    width: float = 1.0
    center: float = 0.0
    samples: Optional[Sequence[complex]] = None

    def __post_init__(self):
        if self.kind not in _WINDOW_KINDS:
            raise DomainError(f"unknown window kind {self.kind!r}")
        if self.kind in ("rectangular", "hann") and not self.tau > 0:
            raise DomainError("support length tau must be positive")
        if self.kind == "gaussian" and not self.width > 0:
            raise DomainError("gaussian width must be positive")
        if self.kind == "custom" and self.samples is None:
            raise DomainError("custom window needs explicit samples")


def sample_window(spec: WindowSpec, grid: Grid) -> SampledSignal:
    """Sample ``spec`` on ``grid`` and rescale to unit discrete norm."""
    t = grid.times
    if spec.kind in ("rectangular", "hann"):
        a, b = spec.support_start, spec.support_start + spec.tau
        # the support is half-open, so it may end one step past the last sample
        if a < grid.t0 - 1e-12 or b > grid.t_end + grid.dt * (1 + 1e-12):
            raise DomainError(
                f"window support [{a}, {b}] exceeds grid span [{grid.t0}, {grid.t_end}]"
            )
        inside = (t >= a - 1e-12 * grid.dt) & (t < b - 1e-12 * grid.dt)
        if spec.kind == "rectangular":
            values = inside.astype(float)
        else:
            values = np.where(inside, np.sin(np.pi * (t - a) / spec.tau) ** 2, 0.0)
    elif spec.kind == "gaussian":
        values = np.exp(-((t - spec.center) ** 2) / (2.0 * spec.width**2))
    else:
        values = np.asarray(spec.samples, dtype=np.complex128)
        if values.shape != (grid.n,):
            raise DomainError("custom samples must match the grid size")

    values = np.asarray(values, dtype=np.complex128)
    nrm = math.sqrt(grid.dt) * np.linalg.norm(values)
    if nrm == 0.0:
        raise DomainError("window samples are identically zero on this grid")
    return SampledSignal(grid, values / nrm, {"window": spec.kind})
