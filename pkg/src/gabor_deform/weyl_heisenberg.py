"""
Modulation, translation and the Weyl-Heisenberg group on a sampled grid.

``U(omega) f(t) = exp(i*omega*t) f(t)`` and ``V(s) f(t) = f(t - s)``.
Translations are circular on the grid: an exact index roll when ``s`` is a
multiple of ``dt``, otherwise a spectral phase ramp (band-limited shift).
Both are exactly unitary and compose exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .fractional_fourier import HermiteBasis, hermite_basis, ladder_operators
from .signal_core import DomainError, SampledSignal

__all__ = [
    "TimeFreqPoint",
    "GroupElement",
    "BoundaryWarning",
    "modulate",
    "translate",
    "gabor_atom",
    "group_compose",
    "apply_group_element",
    "edge_fraction",
    "bch_check",
]

TWO_PI = 2.0 * math.pi


class BoundaryWarning(UserWarning):
    """A signal is not negligible near the grid edges, so wrap-around matters."""


@dataclass(frozen=True)
class TimeFreqPoint:
    omega: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.s)):
            raise DomainError("time-frequency labels must be finite")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "s", float(self.s))

    def __iter__(self):
        yield self.omega
        yield self.s


@dataclass(frozen=True)
class GroupElement:
    """``exp(i*phi) U(omega) V(s)``, with ``phi`` kept in ``[0, 2*pi)``."""

    phi: float
    omega: float
    s: float

    def __post_init__(self):
        phi = math.fmod(float(self.phi), TWO_PI)
        if phi < 0:
            phi += TWO_PI
        if phi >= TWO_PI:  # fmod rounding at -0.0 / tiny negatives
            phi = 0.0
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "s", float(self.s))


def modulate(f: SampledSignal, omega: float) -> SampledSignal:
    if omega == 0:
        return f.with_values(f.values)
    return f.with_values(np.exp(1j * omega * f.times) * f.values)


def translate(f: SampledSignal, s: float) -> SampledSignal:
    """
    Circular translation ``f(t - s)``.

    ``result.meta["translate"]`` is ``"exact"`` for an index roll (``s`` a
    multiple of ``dt`` within ``1e-12*dt``) and ``"spectral"`` otherwise.
    """
    k = f.grid.steps(s)
    if k is not None:
        return f.with_values(np.roll(f.values, k), translate="exact")
    ramp = np.exp(-1j * f.grid.frequencies() * s)
    return f.with_values(np.fft.ifft(ramp * np.fft.fft(f.values)), translate="spectral")


def gabor_atom(g: SampledSignal, p: TimeFreqPoint) -> SampledSignal:
    """``g_{omega,s}(t) = exp(i*omega*t) g(t - s)``."""
    return modulate(translate(g, p.s), p.omega)


def group_compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """``G(phi,w,s) G(phi',w',s') = G(phi + phi' - w' s, w + w', s + s')``."""
    return GroupElement(g1.phi + g2.phi - g2.omega * g1.s, g1.omega + g2.omega, g1.s + g2.s)


def apply_group_element(g: GroupElement, f: SampledSignal) -> SampledSignal:
    out = modulate(translate(f, g.s), g.omega)
    return out.with_values(np.exp(1j * g.phi) * out.values)


def edge_fraction(f: SampledSignal, guard: float = 0.1) -> float:
    """Fraction of ``|f|**2`` within ``guard * span`` of either grid edge."""
    n = f.grid.n
    k = max(1, int(round(guard * n)))
    p = np.abs(f.values) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    return float((p[:k].sum() + p[n - k :].sum()) / total)


def bch_check(
    a: float,
    b: float,
    f: SampledSignal,
    basis: Optional[HermiteBasis] = None,
    m: int = 128,
) -> float:
    """
    Relative residual of ``exp(i(aQ + bP)) f = exp(iab/2) exp(iaQ) exp(ibP) f``.

    The left side is a matrix exponential of the ladder-form generator in a
    truncated Hermite basis; the right side uses the grid operators
    (``exp(ibP) = V(-b)``, ``exp(iaQ) = U(a)``).
    """
    if basis is None:
        basis = hermite_basis(f.grid, m)
    elif basis.grid != f.grid:
        raise DomainError("basis and signal live on different grids")
    if edge_fraction(f) > 1e-20:
        warnings.warn("signal is not negligible near the grid boundary", BoundaryWarning)
    fnorm = np.linalg.norm(f.values)
    if fnorm == 0:
        return 0.0

    q, p = ladder_operators(basis.m)
    coeffs = basis.coefficients(f)
    left = basis.vectors @ (expm(1j * (a * q + b * p)) @ coeffs)
    right = np.exp(0.5j * a * b) * modulate(translate(f, -b), a).values
    return float(np.linalg.norm(left - right) / fnorm)
