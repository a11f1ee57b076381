"""
Numerical checks of the operator identities, bundled for the CLI.

Each check returns a dict with the measured residual, its threshold and a
status: ``pass``, ``fail`` or ``inconclusive`` (the signals it needs are not
contained in the truncated Hermite basis, so a residual would measure
truncation rather than the identity).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fractional_fourier import TurningPointWarning, frft_apply, hermite_basis, leakage, observable_rotation_residual
from .frame_deformation import bounds_invariance_report, coefficient_identity_residual, theorem1_residual
from .gabor_frames import GridAlignmentWarning, LatticeSpec, make_frame
from .signal_core import SampledSignal, WindowSpec, balanced_grid, sample_window
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

__all__ = ["DEFAULT_THRESHOLDS", "CHECKS", "VerifyConfig", "run_checks"]

DEFAULT_THRESHOLDS = {
    "unitarity": 1e-10,
    "group-law": 1e-9,
    "bch": 1e-6,
    "rotation": 1e-10,
    "theorem1": 1e-6,
    "corollary2": 1e-8,
    "corollary2-bounds": 0.02,
}


@dataclass
class VerifyConfig:
    n: int = 256
    m: int = 128
    seed: int = 0
    leakage_threshold: float = 1e-10
    wrong_gamma_sign: bool = False
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))


def _random_limited(basis, k, rng) -> SampledSignal:
    k = min(k, basis.m)
    c = np.zeros(basis.m, dtype=np.complex128)
    c[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return basis.synthesize(c)


def _central_random(grid, rng) -> SampledSignal:
    v = np.zeros(grid.n, dtype=np.complex128)
    lo, hi = int(0.3 * grid.n), int(0.7 * grid.n)
    v[lo:hi] = rng.standard_normal(hi - lo) + 1j * rng.standard_normal(hi - lo)
    return SampledSignal(grid, v)


def _result(name, residual, threshold, leak=0.0, leakage_threshold=1e-10, **extra):
    if leak > leakage_threshold:
        status = "inconclusive"
    else:
        status = "pass" if residual <= threshold else "fail"
    out = {"check": name, "residual": float(residual), "threshold": threshold, "leakage": leak, "status": status}
    out.update(extra)
    return out


def check_unitarity(cfg, basis, rng):
    worst = 0.0
    for _ in range(20):
        f = _random_limited(basis, 32, rng)
        theta = rng.uniform(-2 * math.pi, 2 * math.pi)
        g = frft_apply(basis, theta, f)
        worst = max(worst, abs(np.linalg.norm(g.values) - np.linalg.norm(f.values)) * math.sqrt(f.grid.dt))
    f = _central_random(basis.grid, rng)
    nf = np.linalg.norm(f.values)
    for omega, s in [(3.7, 0.0), (0.0, 0.37), (-1.2, 5 * f.grid.dt)]:
        g = translate(modulate(f, omega), s)
        worst = max(worst, abs(np.linalg.norm(g.values) - nf) / nf)
    return _result("unitarity", worst, cfg.thresholds["unitarity"])


def check_group_law(cfg, basis, rng):
    worst = 0.0
    for _ in range(20):
        f = _random_limited(basis, 32, rng)
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        lhs = frft_apply(basis, t1, frft_apply(basis, t2, f)).values
        rhs = frft_apply(basis, t1 + t2, f).values
        worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(f.values))
    grid = basis.grid
    for _ in range(20):
        f = _central_random(grid, rng)
        a = GroupElement(rng.uniform(0, 6), rng.uniform(-3, 3), rng.integers(-10, 10) * grid.dt)
        b = GroupElement(rng.uniform(0, 6), rng.uniform(-3, 3), rng.integers(-10, 10) * grid.dt)
        lhs = apply_group_element(group_compose(a, b), f).values
        rhs = apply_group_element(a, apply_group_element(b, f)).values
        worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(f.values))
    return _result("group-law", worst, cfg.thresholds["group-law"])


def check_bch(cfg, basis, rng):
    h0 = basis.mode(0)
    worst, leak = 0.0, 0.0
    for a, b in [(1, 0), (0, 1), (1, 1), (2, -1)]:
        target = modulate(translate(h0, -b), a)
        leak = max(leak, leakage(basis, target))
        worst = max(worst, bch_check(a, b, h0, basis=basis))
    return _result("bch", worst, cfg.thresholds["bch"], leak, cfg.leakage_threshold)


def check_rotation(cfg, basis, rng):
    m = min(basis.m, 64)
    worst = 0.0
    for theta in (math.pi / 6, math.pi / 2, 1.0):
        worst = max(worst, *observable_rotation_residual(m, theta))
    return _result("rotation", worst, cfg.thresholds["rotation"], modes=m)


def check_theorem1(cfg, basis, rng):
    h0 = basis.mode(0)
    worst, leak = 0.0, 0.0
    for p in (TimeFreqPoint(1, 0), TimeFreqPoint(0, 1), TimeFreqPoint(2, -1)):
        leak = max(leak, leakage(basis, gabor_atom(h0, p)))
        for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
            r = theorem1_residual(basis, h0, p, theta, conjugate_phase=cfg.wrong_gamma_sign)
            worst = max(worst, r)
    return _result(
        "theorem1", worst, cfg.thresholds["theorem1"], leak, cfg.leakage_threshold,
        conjugated_phase=cfg.wrong_gamma_sign,
    )


def invariance_frame(grid):
    window = sample_window(WindowSpec("gaussian", width=0.75), grid)
    return make_frame(window, LatticeSpec(1.0, 0.5, (-8, 8), (-8, 8)), source="verify")


def check_corollary2(cfg, basis, rng):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridAlignmentWarning)
        frame = invariance_frame(basis.grid)
    leak = leakage(basis, frame.window)
    worst = 0.0
    for theta in (math.pi / 6, math.pi / 2):
        for _ in range(10):
            f = _random_limited(basis, 20, rng)
            worst = max(worst, coefficient_identity_residual(basis, frame, theta, f))
    out = _result("corollary2", worst, cfg.thresholds["corollary2"], leak, cfg.leakage_threshold)
    if out["status"] != "inconclusive":
        rep = bounds_invariance_report(basis, frame, [math.pi / 6, math.pi / 4, math.pi / 2])
        dev = max(max(r["rel_dev_A"], r["rel_dev_B"]) for r in rep)
        out["bounds_rel_dev"] = dev
        out["bounds_threshold"] = cfg.thresholds["corollary2-bounds"]
        if dev > cfg.thresholds["corollary2-bounds"]:
            out["status"] = "fail"
    return out


CHECKS: dict[str, Callable] = {
    "unitarity": check_unitarity,
    "group-law": check_group_law,
    "bch": check_bch,
    "rotation": check_rotation,
    "theorem1": check_theorem1,
    "corollary2": check_corollary2,
}


def run_checks(names, cfg: VerifyConfig) -> list[dict]:
    grid = balanced_grid(cfg.n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TurningPointWarning)
        basis = hermite_basis(grid, cfg.m)
    results = []
    for name in names:
        rng = np.random.default_rng([cfg.seed, list(CHECKS).index(name)])
        results.append(CHECKS[name](cfg, basis, rng))
    return results
