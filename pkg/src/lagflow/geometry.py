"""Pointwise and integral geometry of discrete profile curves.

All derivatives are 4th-order centered finite differences on the periodic
parameter grid.  Arclength operators are grad = (1/sqrt(g)) d/dphi and
lap = grad o grad, so residual tests see the same discretization the flow
uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import DiscreteCurve, NEAR_ORIGIN_REL
from .errors import DegenerateSegment, NotStarshaped, OriginContact

TWO_PI = 2.0 * np.pi


def diff1(q: np.ndarray, h: float) -> np.ndarray:
    """4th-order periodic d/dphi."""
    return (8.0 * (np.roll(q, -1) - np.roll(q, 1)) - (np.roll(q, -2) - np.roll(q, 2))) / (12.0 * h)


def diff2(q: np.ndarray, h: float) -> np.ndarray:
    """4th-order periodic d^2/dphi^2."""
    return (-(np.roll(q, -2) + np.roll(q, 2)) + 16.0 * (np.roll(q, -1) + np.roll(q, 1))
            - 30.0 * q) / (12.0 * h * h)


@dataclass(frozen=True)
class GeometryField:
    """Per-node geometric quantities of one curve at one instant."""

    tangent: np.ndarray      # complex unit tangent z'/|z'|
    nu: np.ndarray           # complex outward unit normal, nu = -i * tangent
    k: np.ndarray            # curvature
    r: np.ndarray            # |z|
    e_r: np.ndarray          # complex radial unit vector (0 where r == 0)
    nu_dot_er: np.ndarray    # <nu, e_r>
    f: np.ndarray            # driving speed k + (n-1) <nu,e_r>/r
    g: np.ndarray            # induced metric |z'|^2
    dmu: np.ndarray          # quadrature weight sqrt(g) * dphi
    beta: np.ndarray | None  # polar deviation angle; None unless starshaped
    n: int
    flagged_near_origin: bool = False

    @property
    def sqrt_g(self) -> np.ndarray:
        return np.sqrt(self.g)

    def grad(self, q: np.ndarray) -> np.ndarray:
        """Discrete arclength derivative d/ds."""
        h = TWO_PI / len(q)
        return diff1(q, h) / self.sqrt_g

    def lap(self, q: np.ndarray) -> np.ndarray:
        """Discrete arclength Laplacian d^2/ds^2."""
        return self.grad(self.grad(q))


def geometry(curve: DiscreteCurve, n: int | None = None) -> GeometryField:
    """Compute the full geometric field of a curve.

    Raises DegenerateSegment when |z'| collapses and OriginContact when
    n >= 2 and the curve touches the origin.  For n == 1 a curve passing
    through the origin is accepted but flagged; radial quantities are
    zeroed at the contact nodes (they carry weight n-1 == 0 in f).
    """
    if n is None:
        n = curve.n_ambient
    n = int(n)
    z = curve.z
    h = TWO_PI / curve.N
    zp = diff1(z, h)
    zpp = diff2(z, h)
    g = zp.real ** 2 + zp.imag ** 2
    sg = np.sqrt(g)
    if np.any(sg < 1e-14):
        raise DegenerateSegment("|z'| below 1e-14 at some node")
    tangent = zp / sg
    nu = -1j * tangent
    k = -(zpp.real * nu.real + zpp.imag * nu.imag) / g
    r = np.abs(z)
    flagged = bool(r.min() < NEAR_ORIGIN_REL * r.max())
    if n >= 2 and (flagged or np.any(r == 0.0)):
        raise OriginContact("curve touches the origin (within resolution) but n >= 2")
    with np.errstate(divide="ignore", invalid="ignore"):
        e_r = np.where(r > 0.0, z / np.where(r > 0.0, r, 1.0), 0.0 + 0.0j)
    nu_dot_er = nu.real * e_r.real + nu.imag * e_r.imag
    if n == 1:
        f = k.copy()
    else:
        f = k + (n - 1) * nu_dot_er / r
    dmu = sg * h
    beta = None
    if nu_dot_er.min() > 0.0:
        wind0 = _winding_number_or_none(z)
        if wind0 not in (None, 0):
            t_dot_er = tangent.real * e_r.real + tangent.imag * e_r.imag
            beta = np.arctan2(t_dot_er, nu_dot_er) / wind0
    return GeometryField(tangent=tangent, nu=nu, k=k, r=r, e_r=e_r,
                         nu_dot_er=nu_dot_er, f=f, g=g, dmu=dmu, beta=beta,
                         n=n, flagged_near_origin=flagged)


def _winding_number_or_none(z: np.ndarray):
    """Rounded winding about the origin, or None if ill-defined."""
    if np.any(np.abs(z) == 0.0):
        return None
    inc = np.angle(np.roll(z, -1) / z)
    w = inc.sum() / TWO_PI
    wi = int(np.rint(w))
    if abs(w - wi) > 1e-6:
        return None
    return wi


def identity_residuals(curve: DiscreteCurve, field: GeometryField) -> dict:
    """Max-norm residuals of the pointwise curve identities.

    res_10a : 1 = |grad r|^2 + <nu,e_r>^2
    res_10b : lap r = <nu,e_r> (<nu,e_r>/r - k)
    res_10c : grad <nu,e_r> = (k - <nu,e_r>/r) grad r
    res_curveeq11 : f = n <nu,e_r>/r - wind0 * grad beta   (starshaped only)
    """
    gr = field.grad(field.r)
    lr = field.lap(field.r)
    gn = field.grad(field.nu_dot_er)
    q = field.nu_dot_er / field.r
    out = {
        "res_10a": float(np.max(np.abs(1.0 - gr * gr - field.nu_dot_er ** 2))),
        "res_10b": float(np.max(np.abs(lr - field.nu_dot_er * (q - field.k)))),
        "res_10c": float(np.max(np.abs(gn - (field.k - q) * gr))),
    }
    if field.beta is None:
        out["res_curveeq11"] = None
    else:
        wind0 = _winding_number_or_none(curve.z)
        gb = field.grad(field.beta)
        out["res_curveeq11"] = float(np.max(np.abs(field.f - field.n * q + wind0 * gb)))
    return out


def require_curveeq11(residuals: dict) -> float:
    if residuals["res_curveeq11"] is None:
        raise NotStarshaped("beta undefined: curve is not starshaped")
    return residuals["res_curveeq11"]


def near_origin_ratio(curve: DiscreteCurve, field: GeometryField, window: int = 5) -> dict:
    """Sample <z,nu>/|z|^2 around the closest approach to the origin.

    Returns the window samples and a quadratic-fit extrapolation of the
    ratio at the (sub-grid) radius minimum.  For curves through the origin
    the limit approximates k(phi_0)/2; nodes with r ~ 0 are excluded from
    the fit.
    """
    if window < 3:
        raise ValueError("window must be >= 3")
    N = curve.N
    j0 = int(np.argmin(field.r))
    idx = (j0 + np.arange(-window, window + 1)) % N
    phi = TWO_PI * np.arange(-window, window + 1) / N  # offsets about node j0
    r = field.r[idx]
    ratio = field.nu_dot_er[idx] / r
    keep = r > 1e-9 * field.r.max()
    # sub-grid location of the r minimum from a parabola through r^2
    w2 = min(window, 3)
    jj = np.arange(-w2, w2 + 1)
    sel = (j0 + jj) % N
    coeff = np.polyfit(TWO_PI * jj / N, field.r[sel] ** 2, 2)
    phi_min = -coeff[1] / (2.0 * coeff[0]) if coeff[0] > 0 else 0.0
    fit = np.polyfit(phi[keep], ratio[keep], 2)
    limit = float(np.polyval(fit, phi_min))
    return {
        "indices": idx,
        "phi_offsets": phi,
        "ratio": ratio,
        "limit": limit,
    }
