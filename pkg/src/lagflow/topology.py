"""Winding numbers, symplectic area, and curve predicates.

The embeddedness test is a dense O(N^2) orientation-based segment test;
at desk scale (N <= 4096) this is cheap and has no special cases beyond
shared polyline nodes.  Pair batches are chunked to bound memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import DiscreteCurve, chord_lengths
from .errors import NonIntegerWinding, RefineGrid
from .geometry import GeometryField, TWO_PI

# angle sums must land this close to 2*pi*integer
WINDING_TOL = 1e-6
# orientation predicates treat |cross| below this (times scale^2) as zero
ORIENT_TOL = 1e-12
# |area| below this (times max r^2) counts as zero for the monotonicity constant
AREA_ZERO_REL = 1e-9

_CHUNK = 128  # segment rows per intersection batch


@dataclass(frozen=True)
class TopologyInfo:
    wind0: int | None        # winding about the origin (None if r touches 0)
    rot: int                 # rotation number of the tangent
    area: float              # symplectic area A(z)
    eps_monotone: float | None   # 2*pi*(rot + (n-1)*wind0)/area, when defined

    def class_sum(self, n: int) -> int | None:
        """rot + (n-1)*wind0, the slope factor of the area law."""
        if self.wind0 is None:
            return None
        return self.rot + (n - 1) * self.wind0


def _angle_sum(v: np.ndarray, what: str) -> int:
    inc = np.angle(np.roll(v, -1) / v)
    if np.any(np.abs(inc) >= np.pi - 1e-12):
        raise RefineGrid(f"{what}: single-step angle increment reached pi")
    w = inc.sum() / TWO_PI
    wi = int(np.rint(w))
    if abs(w - wi) > WINDING_TOL:
        raise NonIntegerWinding(f"{what}: angle sum {w} is not within {WINDING_TOL} of an integer")
    return wi


def topology(curve: DiscreteCurve, field: GeometryField, n: int | None = None) -> TopologyInfo:
    """Winding/rotation numbers, symplectic area, and monotonicity constant."""
    if n is None:
        n = field.n
    z = curve.z
    wind0 = None
    if field.r.min() > 0.0:
        wind0 = _angle_sum(z, "wind0")
    rot = _angle_sum(field.tangent, "rot")
    zdotnu = z.real * field.nu.real + z.imag * field.nu.imag
    area = float(0.5 * np.sum(zdotnu * field.dmu))
    eps = None
    if wind0 is not None and abs(area) > AREA_ZERO_REL * field.r.max() ** 2:
        eps = TWO_PI * (rot + (n - 1) * wind0) / area
    return TopologyInfo(wind0=wind0, rot=rot, area=area, eps_monotone=eps)


# ---------------------------------------------------------------------------
# segment intersection tests


def _orient(ax, ay, bx, by, cx, cy, tol):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return np.sign(np.where(np.abs(v) <= tol, 0.0, v))


def _segments_cross(p, q, a, b, tol):
    """Vectorized proper/improper intersection of segment arrays [p,q] vs [a,b]."""
    o1 = _orient(p[..., 0], p[..., 1], q[..., 0], q[..., 1], a[..., 0], a[..., 1], tol)
    o2 = _orient(p[..., 0], p[..., 1], q[..., 0], q[..., 1], b[..., 0], b[..., 1], tol)
    o3 = _orient(a[..., 0], a[..., 1], b[..., 0], b[..., 1], p[..., 0], p[..., 1], tol)
    o4 = _orient(a[..., 0], a[..., 1], b[..., 0], b[..., 1], q[..., 0], q[..., 1], tol)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)

    def on_box(px, py, ux, uy, vx, vy):
        return ((px >= np.minimum(ux, vx) - tol) & (px <= np.maximum(ux, vx) + tol)
                & (py >= np.minimum(uy, vy) - tol) & (py <= np.maximum(uy, vy) + tol))

    touch = ((o1 == 0) & on_box(a[..., 0], a[..., 1], p[..., 0], p[..., 1], q[..., 0], q[..., 1])) \
        | ((o2 == 0) & on_box(b[..., 0], b[..., 1], p[..., 0], p[..., 1], q[..., 0], q[..., 1])) \
        | ((o3 == 0) & on_box(p[..., 0], p[..., 1], a[..., 0], a[..., 1], b[..., 0], b[..., 1])) \
        | ((o4 == 0) & on_box(q[..., 0], q[..., 1], a[..., 0], a[..., 1], b[..., 0], b[..., 1]))
    return proper | touch


def polyline_self_intersects(pts: np.ndarray) -> bool:
    """Self-intersection over all non-adjacent segment pairs of a closed polyline."""
    N = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    scale = max(1.0, float(np.abs(pts).max()) ** 2)
    tol = ORIENT_TOL * scale
    idx = np.arange(N)
    for lo in range(0, N, _CHUNK):
        ii = idx[lo:lo + _CHUNK]
        sep = (idx[None, :] - ii[:, None]) % N
        sep_rev = (ii[:, None] - idx[None, :]) % N
        mask = (sep >= 2) & (sep_rev >= 2) & (ii[:, None] < idx[None, :])
        if not np.any(mask):
            continue
        ri, rj = np.nonzero(mask)
        if np.any(_segments_cross(a[ii[ri]], b[ii[ri]], a[rj], b[rj], tol)):
            return True
    return False


def polylines_intersect(pts1: np.ndarray, pts2: np.ndarray) -> bool:
    """Any segment of closed polyline 1 meets any segment of closed polyline 2."""
    a1, b1 = pts1, np.roll(pts1, -1, axis=0)
    a2, b2 = pts2, np.roll(pts2, -1, axis=0)
    scale = max(1.0, float(max(np.abs(pts1).max(), np.abs(pts2).max())) ** 2)
    tol = ORIENT_TOL * scale
    n1 = len(pts1)
    for lo in range(0, n1, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, n1))
        p = a1[sl][:, None, :]
        q = b1[sl][:, None, :]
        if np.any(_segments_cross(p, q, a2[None, :, :], b2[None, :, :], tol)):
            return True
    return False


def point_polyline_distance(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distance from each point to a closed polyline (vectorized)."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    ab2 = np.einsum("jk,jk->j", ab, ab)
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", ap, ab) / ab2, 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    d = np.linalg.norm(points[:, None, :] - proj, axis=2)
    return d.min(axis=1)


def hausdorff_distance(pts1: np.ndarray, pts2: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two closed polylines."""
    d12 = point_polyline_distance(pts1, pts2).max()
    d21 = point_polyline_distance(pts2, pts1).max()
    return float(max(d12, d21))


def predicates(curve: DiscreteCurve, field: GeometryField, lagrangian: bool = True) -> dict:
    """Pointwise curve predicates plus the Lagrangian embeddedness verdict.

    Pass lagrangian=False to skip the gamma vs -gamma test (twice the cost
    of the plain embeddedness test; trajectory recording does not need it).
    """
    starshaped = bool(field.nu_dot_er.min() > 0.0)
    tamed = bool(field.f.min() > 0.0)
    austere = bool(field.nu_dot_er.min() > -1.0)
    embedded = not polyline_self_intersects(curve.points)
    out = {
        "starshaped": starshaped,
        "tamed": tamed,
        "austere": austere,
        "embedded": embedded,
    }
    if lagrangian:
        if not embedded:
            lag = "not_embedded"
        else:
            grid_tol = float(chord_lengths(curve).max())
            if hausdorff_distance(curve.points, -curve.points) < grid_tol:
                lag = "double_cover"
            elif polylines_intersect(curve.points, -curve.points):
                lag = "not_embedded"
            else:
                lag = "embedded"
        out["lagrangian_embedding"] = lag
    return out
