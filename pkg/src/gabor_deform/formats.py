"""
On-disk formats: signal CSV, frame descriptors, coefficient CSV, JSON reports.

Floats are written with 17 significant digits so every value round-trips
bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .gabor_frames import GaborFrame, LatticeSpec, make_frame, nyquist_m_range
from .signal_core import Grid, SampledSignal, WindowSpec, balanced_grid, sample_window
from .weyl_heisenberg import TimeFreqPoint

__all__ = [
    "FormatError",
    "fmt",
    "write_signal_csv",
    "read_signal_csv",
    "grid_from_dict",
    "grid_to_dict",
    "window_from_dict",
    "frame_from_descriptor",
    "frame_to_descriptor",
    "write_coefficients_csv",
    "read_coefficients_csv",
    "dumps_json",
]

PathLike = Union[str, Path]


class FormatError(ValueError):
    """A file or descriptor does not follow the expected layout."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_signal_csv(signal: SampledSignal, path: Optional[PathLike] = None) -> str:
    """Write ``index,t,re,im`` rows under a ``# n=..,dt=..,t0=..`` comment line."""
    g = signal.grid
    buf = io.StringIO()
    buf.write(f"# n={g.n},dt={fmt(g.dt)},t0={fmt(g.t0)}\n")
    buf.write("index,t,re,im\n")
    for k, (t, v) in enumerate(zip(g.times, signal.values)):
        buf.write(f"{k},{fmt(t)},{fmt(v.real)},{fmt(v.imag)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


_GRID_LINE = re.compile(r"#\s*n=(?P<n>[^,]+),\s*dt=(?P<dt>[^,]+),\s*t0=(?P<t0>\S+)")


def read_signal_csv(source: PathLike, sidecar: Optional[PathLike] = None) -> SampledSignal:
    """
    Read a signal CSV.  Grid metadata comes from the ``#`` comment line or,
    if absent, from a JSON sidecar (``<file>.json`` by default).
    """
    path = Path(source)
    lines = path.read_text().splitlines()
    grid = None
    body = []
    for line in lines:
        if line.startswith("#"):
            m = _GRID_LINE.match(line)
            if m:
                grid = Grid(int(m["n"]), float(m["dt"]), float(m["t0"]))
        elif line.strip():
            body.append(line)
    if grid is None:
        side = Path(sidecar) if sidecar else path.with_suffix(path.suffix + ".json")
        if not side.exists():
            raise FormatError(f"{path}: no grid comment line and no sidecar {side}")
        grid = grid_from_dict(json.loads(side.read_text()))
    rows = list(csv.DictReader(body))
    if not rows or set(rows[0]) != {"index", "t", "re", "im"}:
        raise FormatError(f"{path}: expected header index,t,re,im")
    if len(rows) != grid.n:
        raise FormatError(f"{path}: {len(rows)} rows for a grid of {grid.n} samples")
    values = np.empty(grid.n, dtype=np.complex128)
    for row in rows:
        values[int(row["index"])] = complex(float(row["re"]), float(row["im"]))
    return SampledSignal(grid, values)


def grid_to_dict(grid: Grid) -> dict:
    return {"n": grid.n, "dt": grid.dt, "t0": grid.t0}


def grid_from_dict(d: Mapping) -> Grid:
    if "balanced" in d:
        return balanced_grid(int(d["balanced"]))
    try:
        return Grid(int(d["n"]), float(d["dt"]), float(d["t0"]))
    except KeyError as exc:
        raise FormatError(f"grid description lacks {exc.args[0]!r}") from None


def window_from_dict(d: Mapping, grid: Grid, base_dir: Optional[Path] = None) -> SampledSignal:
    if "file" in d:
        path = Path(d["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        sig = read_signal_csv(path)
        if sig.grid != grid:
            raise FormatError(f"window file {path} is on a different grid")
        return sig
    params = dict(d.get("params", {}))
    kind = d.get("kind")
    if kind is None:
        raise FormatError("window description needs 'kind' or 'file'")
    allowed = {"support_start", "tau", "width", "center", "samples"}
    unknown = set(params) - allowed
    if unknown:
        raise FormatError(f"unknown window parameters {sorted(unknown)}")
    return sample_window(WindowSpec(kind, **params), grid)


def _range(value, name) -> tuple[int, int]:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise FormatError(f"{name} must be a [lo, hi] pair")
    return int(value[0]), int(value[1])


def frame_from_descriptor(desc: Mapping, base_dir: Optional[Path] = None) -> GaborFrame:
    """
    Build a frame from ``{window, grid, lattice}``.

    ``lattice`` is either ``{tau, T, m_range, n_range}`` (``m_range`` may be
    the string ``"nyquist"``) or ``{points: [[omega, s], ...]}``.
    """
    for key in ("window", "grid", "lattice"):
        if key not in desc:
            raise FormatError(f"frame descriptor lacks {key!r}")
    grid = grid_from_dict(desc["grid"])
    window = window_from_dict(desc["window"], grid, base_dir)
    lat = desc["lattice"]
    if "points" in lat:
        points = [TimeFreqPoint(float(w), float(s)) for w, s in lat["points"]]
        return make_frame(window, points=points, source="descriptor")
    try:
        tau, T = float(lat["tau"]), float(lat["T"])
    except KeyError as exc:
        raise FormatError(f"lattice lacks {exc.args[0]!r}") from None
    m_range = lat.get("m_range", "nyquist")
    m_range = nyquist_m_range(grid, tau) if m_range == "nyquist" else _range(m_range, "m_range")
    n_range = _range(lat.get("n_range"), "n_range")
    return make_frame(window, LatticeSpec(tau, T, m_range, n_range), source="descriptor")


def frame_to_descriptor(frame: GaborFrame, window_file: Optional[str] = None) -> dict:
    desc = {"grid": grid_to_dict(frame.grid)}
    desc["window"] = {"file": window_file} if window_file else {"kind": "custom"}
    if frame.spec is not None:
        spec = frame.spec
        desc["lattice"] = {
            "tau": spec.tau,
            "T": spec.T,
            "m_range": list(spec.m_range),
            "n_range": list(spec.n_range),
        }
    else:
        desc["lattice"] = {"points": [[p.omega, p.s] for p in frame.lattice]}
    return desc


def write_coefficients_csv(frame: GaborFrame, coeffs: Mapping, path: Optional[PathLike] = None) -> str:
    buf = io.StringIO()
    if frame.spec is not None:
        buf.write("m,n,omega,s,re,im\n")
        for (m, n), p in zip(frame.spec.indices(), frame.lattice):
            c = coeffs[p]
            buf.write(f"{m},{n},{fmt(p.omega)},{fmt(p.s)},{fmt(c.real)},{fmt(c.imag)}\n")
    else:
        buf.write("omega,s,re,im\n")
        for p in frame.lattice:
            c = coeffs[p]
            buf.write(f"{fmt(p.omega)},{fmt(p.s)},{fmt(c.real)},{fmt(c.imag)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_coefficients_csv(path: PathLike) -> dict:
    rows = list(csv.DictReader(Path(path).read_text().splitlines()))
    if not rows or not {"omega", "s", "re", "im"} <= set(rows[0]):
        raise FormatError(f"{path}: expected columns omega,s,re,im")
    return {
        TimeFreqPoint(float(r["omega"]), float(r["s"])): complex(float(r["re"]), float(r["im"]))
        for r in rows
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
