"""
Command-line front end.

    gabor-deform window      --config job.json --out DIR
    gabor-deform frame       --config job.json --out DIR
    gabor-deform tighten     --config job.json --out DIR
    gabor-deform bounds      --config job.json --out DIR
    gabor-deform deform      --config job.json --theta pi/6,pi/2 --out DIR
    gabor-deform analyze     --config job.json --out DIR
    gabor-deform synthesize  --config job.json --out DIR
    gabor-deform verify all  [--grid 256] [--basis-size 128]
    gabor-deform report      --config job.json --out DIR

A job is one JSON document (``--config PATH`` or ``--config -`` for stdin).
Exit status: 0 success, 2 usage/config error, 3 domain error (e.g. the frame
condition fails), 4 a verification threshold was exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .formats import (
    FormatError,
    dumps_json,
    frame_from_descriptor,
    frame_to_descriptor,
    grid_from_dict,
    grid_to_dict,
    read_coefficients_csv,
    read_signal_csv,
    window_from_dict,
    write_coefficients_csv,
    write_signal_csv,
)
from .fractional_fourier import TurningPointWarning, hermite_basis
from .frame_deformation import bounds_invariance_report, deform_frame
from .gabor_frames import (
    FrameConditionError,
    analyze,
    bounds_from_periodization,
    frame_bounds_eigen,
    periodization,
    synthesize_compact,
    tighten_window,
)
from .signal_core import DomainError, Grid, balanced_grid, norm
from .verify import CHECKS, DEFAULT_THRESHOLDS, VerifyConfig, run_checks

COMMANDS = ("window", "frame", "tighten", "bounds", "deform", "analyze", "synthesize", "verify", "report")
VERIFY_TARGETS = ("unitarity", "group-law", "bch", "rotation", "theorem1", "corollary2", "all")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class VerificationFailed(Exception):
    pass


_THETA = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<coef>\d+(?:\.\d*)?(?:e[+-]?\d+)?)?\s*\*?\s*"
    r"(?P<pi>pi)?\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_theta(token: str) -> float:
    """Parse ``0.5``, ``pi``, ``-pi/6``, ``2pi``, ``3*pi/4``."""
    m = _THETA.match(token)
    if not m or (m["coef"] is None and m["pi"] is None):
        raise ConfigError(f"cannot parse angle {token!r}")
    value = float(m["coef"]) if m["coef"] else 1.0
    if m["pi"]:
        value *= math.pi
    if m["den"]:
        value /= float(m["den"])
    return -value if m["sign"] == "-" else value


def parse_grid(text: str) -> Grid:
    parts = [p for p in text.split(",") if p.strip()]
    try:
        if len(parts) == 1:
            return balanced_grid(int(parts[0]))
        if len(parts) == 3:
            return Grid(int(parts[0]), float(parts[1]), float(parts[2]))
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"bad --grid {text!r}: {exc}") from None
    raise ConfigError("--grid takes 'n' (balanced) or 'n,dt,t0'")


@dataclass
class JobConfig:
    command: str
    target: Optional[str] = None
    raw: dict = field(default_factory=dict)
    base_dir: Path = Path(".")
    out: Path = Path(".")
    thetas: list = field(default_factory=list)
    basis_size: Optional[int] = None
    grid: Optional[Grid] = None
    leakage_threshold: float = 1e-10
    wrong_gamma_sign: bool = False
    tolerances: dict = field(default_factory=dict)
    loosened: dict = field(default_factory=dict)

    def config_hash(self) -> str:
        payload = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def input_path(self, key: str) -> Path:
        if key not in self.raw:
            raise ConfigError(f"command {self.command!r} needs {key!r} in the config")
        p = Path(self.raw[key])
        return p if p.is_absolute() else self.base_dir / p


def build_config(args) -> JobConfig:
    raw = {}
    base_dir = Path(".")
    if args.config:
        try:
            if args.config == "-":
                raw = json.load(sys.stdin)
            else:
                path = Path(args.config)
                raw = json.loads(path.read_text())
                base_dir = path.parent
        except FileNotFoundError:
            raise ConfigError(f"config file {args.config} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    if "frame" in raw and isinstance(raw["frame"], dict):
        merged = dict(raw["frame"])
        merged.update({k: v for k, v in raw.items() if k != "frame"})
        raw = merged

    cfg = JobConfig(command=args.command, target=getattr(args, "target", None), raw=raw, base_dir=base_dir)
    cfg.out = Path(args.out or raw.get("out", "."))
    if args.theta:
        cfg.thetas = [parse_theta(t) for t in args.theta.split(",") if t.strip()]
    else:
        cfg.thetas = [t if isinstance(t, (int, float)) else parse_theta(str(t)) for t in raw.get("theta", [])]
    cfg.basis_size = args.basis_size if args.basis_size is not None else raw.get("basis_size")
    if args.grid:
        cfg.grid = parse_grid(args.grid)
        raw["grid"] = grid_to_dict(cfg.grid)
    elif "grid" in raw:
        try:
            cfg.grid = grid_from_dict(raw["grid"])
        except (FormatError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
    if args.leakage_threshold is not None:
        cfg.leakage_threshold = args.leakage_threshold
    else:
        cfg.leakage_threshold = float(raw.get("leakage_threshold", 1e-10))

    cfg.wrong_gamma_sign = bool(getattr(args, "wrong_gamma_sign", False)) or bool(
        raw.get("debug", {}).get("wrong_gamma_sign", False)
    )
    tolerances = dict(DEFAULT_THRESHOLDS)
    for name, value in raw.get("tolerances", {}).items():
        if name not in DEFAULT_THRESHOLDS:
            raise ConfigError(f"unknown tolerance {name!r}")
        if value > DEFAULT_THRESHOLDS[name]:
            cfg.loosened[name] = {"default": DEFAULT_THRESHOLDS[name], "used": value}
            print(f"warning: tolerance {name} loosened to {value:g}", file=sys.stderr)
        tolerances[name] = float(value)
    cfg.tolerances = tolerances

    # every referenced file must exist and parse before computing anything
    for key in ("signal", "coefficients"):
        if key in raw:
            path = cfg.input_path(key)
            if not path.exists():
                raise ConfigError(f"{key} file {path} does not exist")
    if "signal" in raw:
        try:
            read_signal_csv(cfg.input_path("signal"))
        except FormatError as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def _provenance(cfg: JobConfig, grid: Optional[Grid] = None, basis_size=None, frame=None) -> dict:
    lattice = None
    if frame is not None:
        lattice = frame_to_descriptor(frame)["lattice"]
    return {
        "lattice": lattice,
        "config_hash": cfg.config_hash(),
        "library_version": __version__,
        "command": cfg.command if cfg.target is None else f"{cfg.command} {cfg.target}",
        "grid": grid_to_dict(grid) if grid is not None else None,
        "basis_size": basis_size,
        "thetas": cfg.thetas,
        "leakage_threshold": cfg.leakage_threshold,
        "tolerances": cfg.tolerances,
        "loosened_tolerances": cfg.loosened,
    }


def _frame(cfg: JobConfig):
    try:
        return frame_from_descriptor(cfg.raw, cfg.base_dir)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None


def _write(cfg: JobConfig, name: str, text: str) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text(text)
    return path


def _basis(grid: Grid, m: Optional[int]):
    m = grid.n if m is None else int(m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TurningPointWarning)
        return hermite_basis(grid, m)


def cmd_window(cfg):
    if cfg.grid is None or "window" not in cfg.raw:
        raise ConfigError("window needs 'grid' and 'window' in the config")
    w = window_from_dict(cfg.raw["window"], cfg.grid, cfg.base_dir)
    _write(cfg, "window.csv", write_signal_csv(w))
    _write(cfg, "window.json", dumps_json({"norm": norm(w), "provenance": _provenance(cfg, w.grid)}))


def cmd_frame(cfg):
    frame = _frame(cfg)
    _write(cfg, "window.csv", write_signal_csv(frame.window))
    desc = frame_to_descriptor(frame, "window.csv")
    desc["points"] = len(frame.lattice)
    desc["provenance"] = _provenance(cfg, frame.grid, frame=frame)
    _write(cfg, "frame.json", dumps_json(desc))


def _need_spec(frame):
    if frame.spec is None:
        raise ConfigError("this command needs a lattice given by tau, T, m_range, n_range")
    return frame.spec


def cmd_tighten(cfg):
    frame = _frame(cfg)
    spec = _need_spec(frame)
    h = tighten_window(frame.window, spec.T, spec.tau)
    _write(cfg, "window_tight.csv", write_signal_csv(h))
    rep = {
        "norm_squared": norm(h) ** 2,
        "T_over_tau": spec.T / spec.tau,
        "bounds_before": bounds_from_periodization(periodization(frame.window, spec.T, spec.tau)).as_dict(),
        "bounds_after": bounds_from_periodization(periodization(h, spec.T, spec.tau)).as_dict(),
        "provenance": _provenance(cfg, frame.grid, frame=frame),
    }
    _write(cfg, "tighten.json", dumps_json(rep))
    print(f"|h|^2 = {rep['norm_squared']:.12g}  (T/tau = {rep['T_over_tau']:.12g})")


def _bounds(frame, strict: bool = True) -> dict:
    """Both bound estimates; with ``strict=False`` a failed one is recorded, not raised."""
    methods = {"eigen": lambda: frame_bounds_eigen(frame).as_dict()}
    if frame.spec is not None:
        spec = frame.spec
        methods["periodization"] = lambda: bounds_from_periodization(
            periodization(frame.window, spec.T, spec.tau)
        ).as_dict()
    out = {}
    for name in sorted(methods):
        try:
            out[name] = methods[name]()
        except DomainError as exc:
            if strict:
                raise
            out[name] = {"error": str(exc)}
    return out


def cmd_bounds(cfg):
    frame = _frame(cfg)
    rep = _bounds(frame)
    rep["provenance"] = _provenance(cfg, frame.grid, frame=frame)
    _write(cfg, "bounds.json", dumps_json(rep))


def _deformation(cfg, frame):
    thetas = cfg.thetas or [0.0, math.pi / 6, math.pi / 4, math.pi / 2]
    basis = _basis(frame.grid, cfg.basis_size)
    entries = bounds_invariance_report(basis, frame, thetas)
    for i, theta in enumerate(thetas):
        deformed = deform_frame(basis, frame, theta)
        _write(cfg, f"window_theta_{i}.csv", write_signal_csv(deformed.window_theta))
        entries[i]["window_file"] = f"window_theta_{i}.csv"
        if deformed.leakage > cfg.leakage_threshold:
            print(f"warning: theta={theta:.6g} leakage {deformed.leakage:.3g}", file=sys.stderr)
        dev = max(entries[i]["rel_dev_A"], entries[i]["rel_dev_B"])
        if dev > cfg.tolerances["corollary2-bounds"]:
            print(
                f"warning: theta={theta:.6g} bounds differ by {dev:.3g}; "
                "the lattice box probably truncates the rotated window",
                file=sys.stderr,
            )
    return basis, entries


def cmd_deform(cfg):
    frame = _frame(cfg)
    basis, entries = _deformation(cfg, frame)
    rep = {"deformations": entries, "provenance": _provenance(cfg, frame.grid, basis.m, frame=frame)}
    _write(cfg, "deformation.json", dumps_json(rep))


def cmd_analyze(cfg):
    frame = _frame(cfg)
    f = read_signal_csv(cfg.input_path("signal"))
    coeffs = analyze(frame, f)
    _write(cfg, "coefficients.csv", write_coefficients_csv(frame, coeffs))


def cmd_synthesize(cfg):
    frame = _frame(cfg)
    coeffs = read_coefficients_csv(cfg.input_path("coefficients"))
    out = synthesize_compact(frame, coeffs)
    _write(cfg, "signal.csv", write_signal_csv(out))
    _write(cfg, "synthesize.json", dumps_json({"meta": out.meta, "provenance": _provenance(cfg, frame.grid, frame=frame)}))


def cmd_verify(cfg):
    target = cfg.target or "all"
    names = list(CHECKS) if target == "all" else [target]
    grid = cfg.grid or balanced_grid(256)
    if not math.isclose(grid.dt * grid.dt * grid.n, 2 * math.pi, rel_tol=1e-12):
        raise ConfigError("verify runs on a balanced grid; pass --grid N")
    vcfg = VerifyConfig(
        n=grid.n,
        m=int(cfg.basis_size or 128),
        seed=int(cfg.raw.get("seed", 0)),
        leakage_threshold=cfg.leakage_threshold,
        wrong_gamma_sign=cfg.wrong_gamma_sign,
        thresholds=cfg.tolerances,
    )
    results = run_checks(names, vcfg)
    rep = {"checks": results, "provenance": _provenance(cfg, grid, vcfg.m)}
    _write(cfg, "verify.json", dumps_json(rep))
    for r in results:
        print(f"{r['check']:<11} {r['status']:<12} residual={r['residual']:.3e} threshold={r['threshold']:.1e}")
        if r["status"] == "inconclusive":
            print(f"warning: {r['check']} leakage {r['leakage']:.3g} exceeds threshold", file=sys.stderr)
    if any(r["status"] == "fail" for r in results):
        raise VerificationFailed(", ".join(r["check"] for r in results if r["status"] == "fail"))


def cmd_report(cfg):
    frame = _frame(cfg)
    rep = {"bounds": _bounds(frame, strict=False)}
    if frame.spec is not None and "a" in rep["bounds"]["periodization"]:
        h = tighten_window(frame.window, frame.spec.T, frame.spec.tau)
        rep["tightened_norm_squared"] = norm(h) ** 2
        rep["T_over_tau"] = frame.spec.T / frame.spec.tau
    basis, entries = _deformation(cfg, frame)
    rep["deformations"] = entries
    rep["provenance"] = _provenance(cfg, frame.grid, basis.m, frame=frame)
    _write(cfg, "report.json", dumps_json(rep))


HANDLERS = {
    "window": cmd_window,
    "frame": cmd_frame,
    "tighten": cmd_tighten,
    "bounds": cmd_bounds,
    "deform": cmd_deform,
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "verify": cmd_verify,
    "report": cmd_report,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gabor-deform", description="Gabor frames and their W(theta) deformations")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("target", nargs="?", default="all", choices=VERIFY_TARGETS)
            # sensitivity control: conjugates the atom-rotation phase so that check must fail
            p.add_argument("--wrong-gamma-sign", action="store_true", help=argparse.SUPPRESS)
        p.add_argument("--config", help="job JSON file, or '-' for stdin")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--theta", help="comma-separated angles, e.g. 0,pi/6,pi/2")
        p.add_argument("--basis-size", type=int, help="number of Hermite modes m")
        p.add_argument("--grid", help="'n' for the balanced grid, or 'n,dt,t0'")
        p.add_argument("--leakage-threshold", type=float, help="Hermite truncation leakage limit")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FrameConditionError as exc:
        print(f"frame condition violated: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
