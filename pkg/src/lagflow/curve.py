"""Closed discrete profile curves in the plane and their file formats.

A curve is a closed polyline with N nodes on the implicit uniform parameter
grid phi_j = 2*pi*j/N.  Node arrays are immutable after construction so
curves can be shared freely between threads and worker processes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateSegment, InvalidSpec, OriginContact

MIN_NODES = 16
# curves closer to the origin than this (relative to max radius) are flagged
NEAR_ORIGIN_REL = 1e-6


@dataclass(frozen=True)
class DiscreteCurve:
    """Closed planar polyline z(phi_j) with ambient dimension bookkeeping."""

    points: np.ndarray          # (N, 2) float64, read-only
    n_ambient: int = 2

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidSpec(f"points must have shape (N, 2), got {pts.shape}")
        if pts.shape[0] < MIN_NODES:
            raise InvalidSpec(f"need at least {MIN_NODES} nodes, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvalidSpec("curve contains non-finite coordinates")
        if int(self.n_ambient) < 1:
            raise InvalidSpec(f"n_ambient must be >= 1, got {self.n_ambient}")
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.any(seg <= 0.0):
            raise DegenerateSegment("curve has a zero-length segment")
        r = np.hypot(pts[:, 0], pts[:, 1])
        if self.n_ambient >= 2 and np.any(r <= 0.0):
            raise OriginContact("curve touches the origin but n_ambient >= 2")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "n_ambient", int(self.n_ambient))

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def z(self) -> np.ndarray:
        """Nodes as a complex array (copy; the complex plane is C = R^2)."""
        return self.points[:, 0] + 1j * self.points[:, 1]

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def near_origin(self) -> bool:
        """True when min |z| is negligible against max |z| (degenerate policy)."""
        r = self.r
        return bool(r.min() < NEAR_ORIGIN_REL * r.max())

    def with_points(self, pts: np.ndarray) -> "DiscreteCurve":
        return DiscreteCurve(points=pts, n_ambient=self.n_ambient)


def from_complex(z: np.ndarray, n_ambient: int = 2) -> DiscreteCurve:
    return DiscreteCurve(points=np.column_stack([z.real, z.imag]), n_ambient=n_ambient)


def chord_lengths(curve_or_z) -> np.ndarray:
    z = curve_or_z.z if isinstance(curve_or_z, DiscreteCurve) else np.asarray(curve_or_z)
    return np.abs(np.roll(z, -1) - z)


def _fmt(x: float) -> str:
    # 17 significant decimal digits round-trips any float64 bit pattern
    return format(float(x), ".17g")


def write_curve_csv(curve: DiscreteCurve, path) -> None:
    lines = ["phi,x,y"]
    phi = curve.phi
    for j in range(curve.N):
        lines.append(f"{_fmt(phi[j])},{_fmt(curve.points[j, 0])},{_fmt(curve.points[j, 1])}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_curve_csv(path, n_ambient: int = 2) -> DiscreteCurve:
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if header != "phi,x,y":
            raise InvalidSpec(f"unexpected curve CSV header: {header!r}")
        rows = [line.split(",") for line in fh.read().split()]
    pts = np.array([[float(x), float(y)] for _, x, y in rows])
    return DiscreteCurve(points=pts, n_ambient=n_ambient)


def curve_json_text(curve: DiscreteCurve, extra: dict | None = None) -> str:
    items = [f'"n": {curve.n_ambient}']
    for key, val in (extra or {}).items():
        items.append(f'"{key}": {_fmt(val) if isinstance(val, float) else json.dumps(val)}')
    pts = ", ".join(f"[{_fmt(x)}, {_fmt(y)}]" for x, y in curve.points)
    items.append(f'"points": [{pts}]')
    return "{" + ", ".join(items) + "}\n"


def write_curve_json(curve: DiscreteCurve, path, extra: dict | None = None) -> None:
    atomic_write_text(path, curve_json_text(curve, extra))


def read_curve_json(path) -> DiscreteCurve:
    with open(path, "r") as fh:
        doc = json.load(fh)
    return DiscreteCurve(points=np.array(doc["points"], dtype=float), n_ambient=int(doc["n"]))


def atomic_write_text(path, text: str) -> None:
    """Write via temp file + rename so partial files never appear."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def periodic_spline(z: np.ndarray) -> CubicSpline:
    """Periodic cubic interpolant of the closed polyline, parametrized by node index."""
    pts = np.concatenate([z, z[:1]])
    return CubicSpline(np.arange(len(pts), dtype=float), pts, bc_type="periodic")


def spline_arclength_table(cs: CubicSpline, n_nodes: int, oversample: int = 8):
    """Cumulative chord-length table of a dense sampling of the spline."""
    m = oversample * n_nodes
    tt = np.linspace(0.0, n_nodes, m + 1)
    fine = cs(tt)
    seg = np.abs(np.diff(fine))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    return tt, s


def spline_length(z: np.ndarray, order: int = 10) -> float:
    """Arclength of the periodic cubic interpolant (Gauss quadrature per span)."""
    cs = periodic_spline(z)
    n = len(z)
    x, w = np.polynomial.legendre.leggauss(order)
    tt = (np.arange(n)[:, None] + 0.5 * (x[None, :] + 1.0)).ravel()
    speed = np.abs(cs(tt, 1)).reshape(n, order)
    return float(np.sum(speed @ w) * 0.5)


def resample_arclength(curve: DiscreteCurve, n_nodes: int | None = None) -> DiscreteCurve:
    """Redistribute nodes to equal polyline arclength spacing.

    Nodes are moved along the periodic cubic interpolant of the input
    polyline until consecutive chords are equal; node 0 stays anchored on
    the original first node, so discrete symmetries survive resampling.
    """
    z = curve.z
    n_out = curve.N if n_nodes is None else int(n_nodes)
    seg = chord_lengths(z)
    if np.any(seg < 1e-14 * seg.max()):
        raise DegenerateSegment("cannot resample a degenerate polyline")
    cs = periodic_spline(z)
    tt, s_dense = spline_arclength_table(cs, curve.N, oversample=8)
    total = s_dense[-1]
    s_nodes = np.interp(np.linspace(0.0, total, n_out, endpoint=False), s_dense, tt)
    znew = cs(s_nodes)
    # chord equalization: a few fixed-point sweeps on the cumulative chord map
    for _ in range(40):
        c = np.abs(np.roll(znew, -1) - znew)
        per = c.sum()
        spread = (c.max() - c.min()) / (per / n_out)
        if spread < 1e-12:
            break
        cum = np.concatenate([[0.0], np.cumsum(c)])  # length n_out + 1
        tgrid = np.concatenate([s_nodes, [curve.N]])
        t_new = np.interp(np.arange(n_out) * per / n_out, cum, tgrid)
        s_nodes = t_new
        znew = cs(s_nodes)
    return from_complex(znew, curve.n_ambient)
