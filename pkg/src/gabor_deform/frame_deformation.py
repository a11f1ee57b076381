"""
Deformations of Gabor frames under ``W(theta)``.

``W(theta)`` carries the atom ``g_{omega,s}`` to a phase times an atom of the
rotated window ``g^theta = W(theta) g`` at rotated labels:

    W(theta) g_{omega,s} = gamma(omega, s, theta) * g^theta_{omega', s'}
    gamma = exp(i/4 (omega**2 - s**2) sin(2 theta) + i omega s sin(theta)**2)
    omega' = omega cos(theta) + s sin(theta)
    s'     = s cos(theta) - omega sin(theta)

Consequently the deformed frame (window ``g^theta``, rotated lattice) has
the same frame operator up to conjugation by ``W(theta)``, hence the same
frame bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .fractional_fourier import (
    AngleLike,
    HermiteBasis,
    RotationAngle,
    angle,
    frft_apply,
)
from .gabor_frames import (
    GaborFrame,
    atom_matrix,
    representable,
    _compress,
)
from .signal_core import DomainError, SampledSignal
from .weyl_heisenberg import TimeFreqPoint, gabor_atom

__all__ = [
    "DeformedFrame",
    "rotate_point",
    "phase_factor",
    "deform_window",
    "theorem1_residual",
    "deform_frame",
    "coefficient_energy",
    "coefficient_identity_residual",
    "coverage_modes",
    "bounds_invariance_report",
]


def rotate_point(p: TimeFreqPoint, theta: AngleLike) -> TimeFreqPoint:
    """Labels of the atom that ``W(theta)`` maps ``g_p`` onto (see module docstring)."""
    th = angle(theta)
    return TimeFreqPoint(p.omega * th.alpha + p.s * th.beta, p.s * th.alpha - p.omega * th.beta)


def phase_factor(p: TimeFreqPoint, theta: AngleLike, conjugate: bool = False) -> complex:
    """``gamma(omega, s, theta)``; ``conjugate=True`` flips its sign for sensitivity checks."""
    th = angle(theta)
    exponent = 0.25 * (p.omega**2 - p.s**2) * math.sin(2.0 * th.theta) + p.omega * p.s * th.beta**2
    if conjugate:
        exponent = -exponent
    return complex(math.cos(exponent), math.sin(exponent))


def deform_window(
    basis: HermiteBasis, g: SampledSignal, theta: AngleLike
) -> tuple[SampledSignal, float]:
    out = frft_apply(basis, theta, g)
    return out, out.meta["leakage"]


def theorem1_residual(
    basis: HermiteBasis,
    g: SampledSignal,
    p: TimeFreqPoint,
    theta: AngleLike,
    conjugate_phase: bool = False,
) -> float:
    """``||W g_p - gamma * g^theta_{rotate(p)}|| / ||g||``."""
    th = angle(theta)
    lhs = frft_apply(basis, th, gabor_atom(g, p))
    g_theta = frft_apply(basis, th, g)
    rhs = gabor_atom(g_theta, rotate_point(p, th))
    gamma = phase_factor(p, th, conjugate=conjugate_phase)
    diff = lhs.values - gamma * rhs.values
    return float(np.linalg.norm(diff) / np.linalg.norm(g.values))


@dataclass(frozen=True, eq=False)
class DeformedFrame:
    base: GaborFrame
    theta: RotationAngle
    window_theta: SampledSignal
    lattice_theta: tuple
    leakage: float

    def as_frame(self) -> GaborFrame:
        """The deformed family as a plain :class:`GaborFrame` (arbitrary lattice)."""
        window = self.window_theta
        nrm = math.sqrt(window.grid.dt) * np.linalg.norm(window.values)
        if nrm > 0 and abs(nrm - 1.0) > 1e-10:
            # truncation leakage shortened the window; renormalise for the frame type
            window = window.with_values(window.values / nrm)
        return GaborFrame(
            window,
            self.lattice_theta,
            None,
            {"deformed_from": self.base.provenance, "theta": self.theta.theta},
        )


def deform_frame(basis: HermiteBasis, frame: GaborFrame, theta: AngleLike) -> DeformedFrame:
    th = angle(theta)
    window, leak = deform_window(basis, frame.window, th)
    lattice = tuple(rotate_point(p, th) for p in frame.lattice)
    return DeformedFrame(frame, th, window, lattice, leak)


def coefficient_energy(
    window: SampledSignal,
    points: Sequence[TimeFreqPoint],
    f: SampledSignal,
    representable_only: bool = True,
) -> float:
    """
    ``sum_p |<window_p, f>|**2``.

    With ``representable_only`` the sum skips labels outside the grid's
    time-frequency cell, whose sampled atoms are aliases.
    """
    pts = list(points)
    if representable_only:
        mask = representable(pts, f.grid)
        pts = [p for p, keep in zip(pts, mask) if keep]
    if not pts:
        return 0.0
    rows = atom_matrix(window, pts)
    c = f.grid.dt * (rows.conj() @ f.values)
    return float(np.sum(np.abs(c) ** 2))


def coefficient_identity_residual(
    basis: HermiteBasis,
    frame: GaborFrame,
    theta: AngleLike,
    f: SampledSignal,
    deformed: Optional[DeformedFrame] = None,
) -> float:
    """
    Relative gap between ``sum_{Gamma_theta} |<g^theta_p, f>|**2`` and
    ``sum_{Gamma} |<g_p, W(-theta) f>|**2``.
    """
    th = angle(theta)
    if deformed is None:
        deformed = deform_frame(basis, frame, th)
    lhs = coefficient_energy(deformed.window_theta, deformed.lattice_theta, f)
    f_back = frft_apply(basis, -th, f)
    rhs = coefficient_energy(frame.window, frame.lattice, f_back)
    return abs(lhs - rhs) / max(abs(rhs), np.finfo(float).tiny)


def coverage_modes(frame: GaborFrame) -> int:
    """
    Number of Hermite modes whose classical orbit (radius ``sqrt(2k + 1)``)
    fits inside the box spanned by the frame's representable labels.

    The span of these modes is invariant under every ``W(theta)``, so it is
    a comparison subspace that rotates with the lattice.
    """
    pts = [p for p, keep in zip(frame.lattice, representable(frame.lattice, frame.grid)) if keep]
    if not pts:
        raise DomainError("no lattice point is representable on this grid")
    om = np.array([p.omega for p in pts])
    s = np.array([p.s for p in pts])
    radius = min(om.max(), -om.min(), s.max(), -s.min())
    if radius <= 1.0:
        raise DomainError("lattice box does not contain the ground-state orbit")
    return int(math.floor((radius * radius - 1.0) / 2.0)) + 1


def _bounds_on(window, points, subspace) -> tuple[float, float]:
    pts = [p for p, keep in zip(points, representable(points, window.grid)) if keep]
    rows = atom_matrix(window, pts)
    s = window.grid.dt * (rows.T @ rows.conj())
    eig = np.linalg.eigvalsh(_compress(s, subspace, window.grid.dt))
    return float(eig[0]), float(eig[-1])


def bounds_invariance_report(
    basis: HermiteBasis,
    frame: GaborFrame,
    thetas: Iterable[AngleLike],
    modes: Optional[int] = None,
    probe_seed: int = 0,
) -> list[dict]:
    """
    Frame bounds of the base frame and of each deformation, on matched subspaces.

    The base bounds are taken on the span ``V`` of the first ``modes`` Hermite
    vectors (default :func:`coverage_modes`); the deformed bounds on
    ``W(theta) V``.  Atoms whose labels fall outside the grid's
    time-frequency cell are excluded on both sides.  Each entry also carries
    the coefficient-level identity residual for a seeded random probe in ``V``.
    """
    grid = frame.grid
    if basis.grid != grid:
        raise DomainError("basis and frame live on different grids")
    k = coverage_modes(frame) if modes is None else int(modes)
    if k > basis.m:
        raise DomainError(f"comparison subspace needs {k} modes, basis has {basis.m}")
    sub = np.asarray(basis.vectors[:, :k])
    a0, b0 = _bounds_on(frame.window, frame.lattice, sub)

    rng = np.random.default_rng(probe_seed)
    probe = basis.synthesize(
        np.concatenate([rng.standard_normal(k) + 1j * rng.standard_normal(k), np.zeros(basis.m - k)])
    )

    report = []
    for theta in thetas:
        th = angle(theta)
        deformed = deform_frame(basis, frame, th)
        phases = np.exp(1j * th.theta * basis.eigenvalues[:k])
        a1, b1 = _bounds_on(deformed.window_theta, deformed.lattice_theta, sub * phases)
        kept = int(representable(deformed.lattice_theta, grid).sum())
        report.append(
            {
                "theta": th.theta,
                "A_base": a0,
                "B_base": b0,
                "A_theta": a1,
                "B_theta": b1,
                "rel_dev_A": abs(a1 - a0) / a0,
                "rel_dev_B": abs(b1 - b0) / b0,
                "coefficient_identity": coefficient_identity_residual(
                    basis, frame, th, probe, deformed
                ),
                "leakage": deformed.leakage,
                "n": grid.n,
                "m": basis.m,
                "modes": k,
                "points_used": kept,
                "points_total": len(deformed.lattice_theta),
            }
        )
    return report
