"""
The harmonic-oscillator rotation group ``W(theta) = exp(i*theta*H)``.

Two independent routes are provided:

* :func:`frft_apply` diagonalises ``H = (Q**2 + P**2)/2`` in a sampled,
  discretely orthonormalised Hermite basis and multiplies each mode by
  ``exp(i*theta*(n + 1/2))``.
* :func:`mehler_apply` integrates the closed-form Mehler kernel directly.

With ``W(theta)`` generated by ``+H`` the kernel is

    K(u, t) = (-2*pi*i*sin(theta))**(-1/2)
              * exp(i*u*t/sin(theta) - i*(u**2 + t**2)*cot(theta)/2),

and at ``theta = pi/2`` it reduces to ``exp(i*pi/4)`` times the unitary
Fourier transform with kernel ``exp(+i*u*t)/sqrt(2*pi)``.  That sign is what
makes ``W(theta)`` rotate the time-frequency plane in the same sense as the
observables ``Q cos(theta) + P sin(theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .signal_core import DomainError, Grid, SampledSignal

__all__ = [
    "HermiteBasis",
    "RotationAngle",
    "SingularAngleError",
    "TurningPointWarning",
    "angle",
    "hermite_basis",
    "frft_apply",
    "leakage",
    "mehler_apply",
    "singular_case",
    "reflect",
    "unitary_dft",
    "ladder_operators",
    "observable_rotation_residual",
]


class SingularAngleError(DomainError):
    """The Mehler kernel is singular at integer multiples of pi."""


class TurningPointWarning(UserWarning):
    """The grid does not reach the classical turning point of the top mode."""


@dataclass(frozen=True)
class RotationAngle:
    theta: float
    alpha: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise DomainError("rotation angle must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", math.cos(theta))
        object.__setattr__(self, "beta", math.sin(theta))

    def __neg__(self):
        return RotationAngle(-self.theta)

    def __add__(self, other):
        return RotationAngle(self.theta + angle(other).theta)


AngleLike = Union[RotationAngle, float]


def angle(theta: AngleLike) -> RotationAngle:
    return theta if isinstance(theta, RotationAngle) else RotationAngle(theta)


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """
    ``m`` sampled Hermite functions, orthonormal in the ``dt``-weighted
    inner product.  ``vectors`` has shape ``(n, m)``; column ``k`` is mode ``k``.
    """

    grid: Grid
    m: int
    vectors: np.ndarray
    eigenvalues: np.ndarray

    def mode(self, k: int) -> SampledSignal:
        return SampledSignal(self.grid, self.vectors[:, k])

    def coefficients(self, f: SampledSignal) -> np.ndarray:
        _require_grid(self.grid, f)
        return self.grid.dt * (self.vectors.conj().T @ f.values)

    def synthesize(self, coeffs) -> SampledSignal:
        return SampledSignal(self.grid, self.vectors @ np.asarray(coeffs))

    def project(self, f: SampledSignal) -> SampledSignal:
        return self.synthesize(self.coefficients(f))

    def gram(self) -> np.ndarray:
        return self.grid.dt * (self.vectors.conj().T @ self.vectors)


def _require_grid(grid: Grid, f: SampledSignal):
    if f.grid != grid:
        raise DomainError(f"signal grid {f.grid} does not match basis grid {grid}")


def _hermite_functions(t: np.ndarray, m: int) -> np.ndarray:
    # normalised recurrence keeps values O(1) for large orders
    h = np.empty((t.size, m))
    h[:, 0] = np.pi**-0.25 * np.exp(-0.5 * t * t)
    if m > 1:
        h[:, 1] = math.sqrt(2.0) * t * h[:, 0]
    for k in range(1, m - 1):
        h[:, k + 1] = (
            math.sqrt(2.0 / (k + 1)) * t * h[:, k] - math.sqrt(k / (k + 1)) * h[:, k - 1]
        )
    return h


def hermite_basis(grid: Grid, m: int) -> HermiteBasis:
    """
    Sample Hermite functions ``h_0 .. h_{m-1}`` on ``grid`` and re-orthonormalise.

    Orthonormalisation is a QR factorisation of the ``sqrt(dt)``-scaled sample
    matrix (Gram-Schmidt in the discrete inner product), with column signs
    fixed so each vector stays aligned with its sampled Hermite function.

    Requesting more modes than samples raises :class:`DomainError`.  If the
    grid does not reach the turning points ``+-sqrt(2m)`` of the top mode a
    :class:`TurningPointWarning` is issued; low modes remain accurate, only
    the highest ones are distorted by the finite grid.
    """
    m = int(m)
    if m < 1:
        raise DomainError("basis needs at least one mode")
    if m > grid.n:
        raise DomainError(f"cannot build {m} orthonormal modes on {grid.n} samples")
    reach = min(-grid.t0, grid.t_end)
    if reach < math.sqrt(2.0 * m):
        warnings.warn(
            f"grid reaches |t| <= {reach:.3g}, below the turning point "
            f"{math.sqrt(2.0 * m):.3g} of mode {m - 1}; top modes are distorted",
            TurningPointWarning,
            stacklevel=2,
        )

    raw = _hermite_functions(grid.times, m)
    q, r = np.linalg.qr(math.sqrt(grid.dt) * raw)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    vectors = (q * signs) / math.sqrt(grid.dt)
    vectors = vectors.astype(np.complex128)
    vectors.flags.writeable = False
    eig = np.arange(m) + 0.5
    eig.flags.writeable = False
    return HermiteBasis(grid, m, vectors, eig)


def leakage(basis: HermiteBasis, f: SampledSignal) -> float:
    """Relative norm of the part of ``f`` outside the span of ``basis``."""
    _require_grid(basis.grid, f)
    total = np.linalg.norm(f.values)
    if total == 0.0:
        return 0.0
    rest = f.values - basis.project(f).values
    return float(np.linalg.norm(rest) / total)


def frft_apply(basis: HermiteBasis, theta: AngleLike, f: SampledSignal) -> SampledSignal:
    """
    Apply ``W(theta)`` spectrally: ``sum_n exp(i*theta*(n+1/2)) <h_n, f> h_n``.

    The component of ``f`` outside the basis span is dropped; its relative
    norm is reported in ``result.meta["leakage"]``.
    """
    theta = angle(theta)
    coeffs = basis.coefficients(f)
    phases = np.exp(1j * theta.theta * basis.eigenvalues)
    out = basis.vectors @ (phases * coeffs)
    total = np.linalg.norm(f.values)
    rest = np.linalg.norm(f.values - basis.vectors @ coeffs)
    leak = float(rest / total) if total > 0 else 0.0
    return SampledSignal(f.grid, out, {"leakage": leak, "theta": theta.theta})


def _mehler_prefactor(theta: float) -> complex:
    # continuous branch of (-2*pi*i*sin(theta))**(-1/2) along the group,
    # including the sign flip W(theta + 2*pi) = -W(theta)
    turns, rem = divmod(theta, 2.0 * math.pi)
    sign = -1.0 if int(turns) % 2 else 1.0
    phase = math.pi / 4 if rem < math.pi else 3 * math.pi / 4
    return sign * complex(math.cos(phase), math.sin(phase)) / math.sqrt(
        2.0 * math.pi * abs(math.sin(rem))
    )


def _oversampling(theta: RotationAngle, g: SampledSignal) -> int:
    # the integrand's local frequency is |u*csc - t*cot| plus the bandwidth of g;
    # pick a refinement whose Nyquist limit covers it for every output sample u
    t = g.times
    mag = np.abs(g.values)
    live = t[mag > 1e-16 * mag.max()] if mag.max() > 0 else t
    umax = max(abs(g.grid.t0), abs(g.grid.t_end))
    need = (
        umax / abs(theta.beta)
        + np.abs(live).max() * abs(theta.alpha / theta.beta)
        + g.grid.nyquist
    )
    return max(1, math.ceil(need / g.grid.nyquist))


def _refine(g: SampledSignal, r: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Band-limited interpolation of ``g`` onto a grid ``r`` times finer."""
    n = g.grid.n
    if r == 1:
        return g.times, g.values, g.grid.dt
    spec = np.fft.fft(g.values)
    fine = np.zeros(r * n, dtype=np.complex128)
    half = n // 2
    fine[:half] = spec[:half]
    fine[-half:] = spec[-half:]
    if n % 2 == 0:
        # split the Nyquist bin symmetrically so real signals stay real
        fine[half] = 0.5 * spec[half]
        fine[-half] = 0.5 * spec[half]
    else:
        fine[half] = spec[half]
    values = np.fft.ifft(fine) * r
    dt = g.grid.dt / r
    times = g.grid.t0 + np.arange(r * n) * dt
    return times, values, dt


def mehler_apply(
    theta: AngleLike, g: SampledSignal, oversample: Union[int, str] = "auto"
) -> SampledSignal:
    """
    Apply ``W(theta)`` by direct Riemann-sum quadrature of the Mehler kernel.

    Independent of the Hermite basis; used as an oracle.  The input is
    band-limited-interpolated onto a finer grid (``oversample`` times, chosen
    automatically by default) so the oscillatory kernel is resolved for every
    output sample.  Raises :class:`SingularAngleError` when
    ``|sin(theta)| < 1e-6``; use :func:`singular_case` or :func:`frft_apply` there.
    """
    theta = angle(theta)
    if abs(theta.beta) < 1e-6:
        raise SingularAngleError(
            f"theta={theta.theta!r} is within 1e-6 of a multiple of pi; "
            "use singular_case or frft_apply"
        )
    r = _oversampling(theta, g) if oversample == "auto" else int(oversample)
    t, values, dt = _refine(g, r)
    u = g.times
    csc = 1.0 / theta.beta
    cot = theta.alpha / theta.beta
    chirp_in = np.exp(-0.5j * cot * t * t) * values
    out = np.empty(u.size, dtype=np.complex128)
    # row blocks bound the kernel's memory footprint; summation order is fixed
    for start in range(0, u.size, 256):
        block = u[start : start + 256, None]
        out[start : start + 256] = np.exp(1j * csc * block * t[None, :]) @ chirp_in
    out *= _mehler_prefactor(theta.theta) * dt * np.exp(-0.5j * cot * u * u)
    return SampledSignal(g.grid, out, {"theta": theta.theta, "oversample": r})


def reflect(g: SampledSignal) -> SampledSignal:
    """``g(-t)`` by index reversal; the grid must be symmetric (mod its span)."""
    k = g.grid.steps(2.0 * g.grid.t0)
    if k is None:
        raise DomainError("reflection t -> -t needs 2*t0 to be a multiple of dt")
    idx = (-np.arange(g.grid.n) - k) % g.grid.n
    return g.with_values(g.values[idx])


def singular_case(n: int, g: SampledSignal) -> SampledSignal:
    """Exact ``W(n*pi) g = i**n * g((-1)**n t)``."""
    n = int(n)
    out = reflect(g) if n % 2 else g
    return out.with_values((1j) ** (n % 4) * out.values)


def unitary_dft(f: SampledSignal) -> SampledSignal:
    """
    Sampled ``(2*pi)**(-1/2) * integral exp(+i*u*t) f(t) dt`` on a balanced grid.

    On the balanced grid the frequency spacing equals ``dt`` and the output is
    again indexed by the grid times, so ``W(pi/2) f = exp(i*pi/4) * unitary_dft(f)``.
    """
    grid = f.grid
    k = grid.steps(grid.t0)
    if k is None or not math.isclose(grid.dt * grid.dt * grid.n, 2 * math.pi, rel_tol=1e-12):
        raise DomainError("unitary_dft needs a balanced grid")
    # t_j = (j + k) dt, so exp(i t_j t_l) = exp(2*pi*i (j+k)(l+k)/n)
    j = np.arange(grid.n)
    pre = np.exp(2j * np.pi * k * j / grid.n)
    y = np.fft.ifft(pre * f.values, norm="ortho")
    out = pre * y * np.exp(2j * np.pi * k * k / grid.n)
    return f.with_values(out)


def ladder_operators(m: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Position ``Q`` and momentum ``P = -i d/dt`` in the first ``m`` Hermite modes.

    Built from the annihilation operator ``a h_n = sqrt(n) h_{n-1}``:
    ``Q = (a + a^+)/sqrt(2)``, ``P = -i (a - a^+)/sqrt(2)``.
    """
    a = np.diag(np.sqrt(np.arange(1, m, dtype=float)), k=1).astype(np.complex128)
    ad = a.conj().T
    q = (a + ad) / math.sqrt(2.0)
    p = -1j * (a - ad) / math.sqrt(2.0)
    return q, p


def observable_rotation_residual(basis, theta: AngleLike) -> tuple[float, float]:
    """
    Spectral-norm residuals of ``W Q W^+ - (Q cos + P sin)`` and
    ``W P W^+ - (P cos - Q sin)`` on the leading ``(m-2)``-mode block.

    ``basis`` may be a :class:`HermiteBasis` or a plain mode count.
    """
    theta = angle(theta)
    m = basis.m if isinstance(basis, HermiteBasis) else int(basis)
    if m < 3:
        raise DomainError("need at least 3 modes to leave an interior block")
    q, p = ladder_operators(m)
    w = np.exp(1j * theta.theta * (np.arange(m) + 0.5))
    wq = (w[:, None] * q) * w.conj()[None, :]
    wp = (w[:, None] * p) * w.conj()[None, :]
    rq = wq - (theta.alpha * q + theta.beta * p)
    rp = wp - (theta.alpha * p - theta.beta * q)
    block = slice(0, m - 2)
    return (
        float(np.linalg.norm(rq[block, block], 2)),
        float(np.linalg.norm(rp[block, block], 2)),
    )
