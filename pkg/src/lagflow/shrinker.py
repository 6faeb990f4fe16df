"""Self-similar (homothetic) profile curves by ODE integration and shooting.

The profile of a self-similar solution satisfies f = (eps/2) <z, nu>,
equivalently the curvature closure k = (1 - 2(n-1)/(eps |z|^2)) f.  Closed
candidates are found by shooting in the starting radius: since every
non-line solution is starshaped, the polar angle is a global parameter and
closure reduces to the tangent returning to its radial alignment after the
target number of turns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .curve import DiscreteCurve, from_complex, resample_arclength
from .errors import InvalidSpec, NoReturn, NoRoot, NotClosed, OriginContact

TWO_PI = 2.0 * np.pi
# shooting trajectories are abandoned when the tangent leaves this chi band
CHI_MARGIN = 0.02


@dataclass(frozen=True)
class ShrinkerSpec:
    n: int
    eps: float                      # > 0 contracting, < 0 expanding
    r_start: float = 1.0            # starting radius on the symmetry axis
    arc_steps: int = 4096           # arc budget in units of 2 pi r_start / 256
    target_rot_wind: tuple = (1, 1)

    def __post_init__(self):
        if self.eps == 0.0:
            raise InvalidSpec("eps must be nonzero (minimal case out of scope)")
        if self.r_start <= 0.0:
            raise InvalidSpec("r_start must be positive")
        if self.n < 1 or self.arc_steps < 16:
            raise InvalidSpec("need n >= 1 and arc_steps >= 16")

    @property
    def circle_radius(self) -> float | None:
        """Radius of the round solution, when one exists (eps > 0)."""
        if self.eps > 0:
            return float(np.sqrt(2.0 * self.n / self.eps))
        return None


@dataclass(frozen=True)
class ProfileODEState:
    """Arclength frame: position, tangent angle, arclength."""
    x: float
    y: float
    theta: float
    s: float


def shrinker_curvature(z, nu, spec: ShrinkerSpec):
    """Curvature the self-similar closure prescribes at position z, normal nu."""
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    r2 = z[..., 0] ** 2 + z[..., 1] ** 2
    if np.any(r2 == 0.0):
        raise OriginContact("shrinker curvature undefined at the origin")
    zdotnu = z[..., 0] * nu[..., 0] + z[..., 1] * nu[..., 1]
    f = 0.5 * spec.eps * zdotnu
    return (1.0 - 2.0 * (spec.n - 1) / (spec.eps * r2)) * f


def first_integral(z, theta, spec: ShrinkerSpec):
    """p = f exp(-eps |z|^2 / 4) |z|^(n-1), constant along exact profiles."""
    x, y = z[..., 0], z[..., 1]
    r2 = x * x + y * y
    nux, nuy = np.sin(theta), -np.cos(theta)
    f = 0.5 * spec.eps * (x * nux + y * nuy)
    return f * np.exp(-0.25 * spec.eps * r2) * np.sqrt(r2) ** (spec.n - 1)


@dataclass(frozen=True)
class ProfileResult:
    s: np.ndarray
    points: np.ndarray        # (m, 2)
    theta: np.ndarray
    p: np.ndarray
    returned: bool            # reached the symmetry axis again
    s_return: float | None
    p_drift: float            # max relative drift of the first integral
    k_signflip_radius_err: float | None   # |r - sqrt(2(n-1)/eps)| at k sign flips

    def state(self, i: int) -> ProfileODEState:
        return ProfileODEState(x=float(self.points[i, 0]), y=float(self.points[i, 1]),
                               theta=float(self.theta[i]), s=float(self.s[i]))


def integrate_profile(spec: ShrinkerSpec) -> ProfileResult:
    """Integrate the profile ODE from the symmetry axis until it returns.

    Starts at (r_start, 0) with tangent angle pi/2 (so <z,nu> = r_start) and
    integrates dx/ds = cos theta, dy/ds = sin theta, dtheta/ds = k until the
    trajectory crosses the axis y = 0 again, recording the first integral p.
    Raises NoReturn when the arc budget runs out first (expanders).
    """
    n, eps = spec.n, spec.eps

    def rhs(s, u):
        x, y, th = u
        r2 = x * x + y * y
        nux, nuy = np.sin(th), -np.cos(th)
        f = 0.5 * eps * (x * nux + y * nuy)
        k = (1.0 - 2.0 * (n - 1) / (eps * r2)) * f
        return [np.cos(th), np.sin(th), k]

    def hit_axis(s, u):
        return u[1]
    hit_axis.terminal = True
    hit_axis.direction = -1.0

    def hit_origin(s, u):
        return np.hypot(u[0], u[1]) - 1e-9 * spec.r_start
    hit_origin.terminal = True

    s_max = spec.arc_steps * (TWO_PI * spec.r_start / 256.0)
    sol = solve_ivp(rhs, (0.0, s_max), [spec.r_start, 0.0, 0.5 * np.pi],
                    method="RK45", rtol=1e-10, atol=1e-12, dense_output=True,
                    events=[hit_axis, hit_origin])
    if sol.t_events[1].size:
        raise OriginContact("profile reached the origin (line-type solution)")
    returned = sol.t_events[0].size > 0
    s_end = float(sol.t_events[0][0]) if returned else float(sol.t[-1])
    m = min(spec.arc_steps, 4096)
    s_grid = np.linspace(0.0, s_end, m + 1)
    x, y, th = sol.sol(s_grid)
    pts = np.column_stack([x, y])
    p = first_integral(pts, th, spec)
    p_drift = float(np.max(np.abs(p - p[0])) / abs(p[0])) if p[0] != 0 else np.inf

    flips = None
    r = np.hypot(x, y)
    if n > 1 and eps > 0:
        k = shrinker_curvature(pts, np.column_stack([np.sin(th), -np.cos(th)]), spec)
        sign = np.sign(k)
        idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        if idx.size:
            r_c = np.sqrt(2.0 * (n - 1) / eps)
            flips = float(np.max(np.abs(0.5 * (r[idx] + r[idx + 1]) - r_c)))
    if not returned:
        raise NoReturn(f"no axis return within arc budget s_max={s_max:.3g}")
    return ProfileResult(s=s_grid, points=pts, theta=th, p=p, returned=returned,
                         s_return=s_end, p_drift=p_drift, k_signflip_radius_err=flips)


def _profile_rhs(n, eps):
    """Arclength frame with accumulated polar angle: u = (x, y, theta, a)."""
    def rhs(s, u):
        x, y, th, a = u
        r2 = x * x + y * y
        zdotnu = x * np.sin(th) - y * np.cos(th)
        k = (1.0 - 2.0 * (n - 1) / (eps * r2)) * 0.5 * eps * zdotnu
        return [np.cos(th), np.sin(th), k, zdotnu / r2]
    return rhs


def _shoot(n, eps, r_start, wind, dense=False):
    """Integrate until the polar angle reaches 2 pi wind (or chi leaves (0, pi))."""
    target = TWO_PI * wind

    def done(s, u):
        return u[3] - target
    done.terminal = True
    done.direction = 1.0

    def lo(s, u):
        return (u[2] - u[3]) - CHI_MARGIN

    def hi(s, u):
        return (np.pi - CHI_MARGIN) - (u[2] - u[3])
    lo.terminal = True
    hi.terminal = True

    s_max = 8.0 * target * max(r_start, 1.0)
    return solve_ivp(_profile_rhs(n, eps), (0.0, s_max),
                     [r_start, 0.0, 0.5 * np.pi, 0.0],
                     method="RK45", rtol=1e-11, atol=1e-13,
                     dense_output=dense, events=[done, lo, hi])


def _closure_defect(n, eps, r_start, wind):
    """(chi - pi/2, r) at polar angle 2 pi wind; chi = theta - arg z.

    Starshapedness of true solutions keeps chi in (0, pi); shots that leave
    the band are terminated at the boundary, which preserves the sign of
    the defect for bracketing.
    """
    sol = _shoot(n, eps, r_start, wind)
    x, y, th, a = sol.y[:, -1]
    return float((th - a) - 0.5 * np.pi), float(np.hypot(x, y))


def shoot_closed(n: int, eps: float, target_rot_wind=(1, 1), bracket=(0.5, 1.5),
                 N: int = 512) -> tuple[ShrinkerSpec, DiscreteCurve]:
    """Shoot in r_start until the profile closes with the target invariants.

    The closure defect is the total tangent turning minus 2 pi rot after
    `wind` polar turns; the bracket must contain a sign change (several
    roots can coexist, one per lobe count, and the bracket selects one).
    Every closed solution satisfies rot == wind (starshapedness pins the
    tangent to the radial frame), so other targets report NoRoot.

    The tangent can also realign after an odd number of half-oscillations,
    where the radius sits on the opposite extremum and the profile does not
    close; such roots are rejected as NotClosed (move the bracket).
    """
    rot, wind = int(target_rot_wind[0]), int(target_rot_wind[1])
    if wind < 1:
        raise InvalidSpec("wind target must be >= 1")
    if eps <= 0:
        raise NoRoot("closed profiles require eps > 0 (expanders are non-compact)")
    offset = TWO_PI * (wind - rot)

    def defect(r0):
        d, _ = _closure_defect(n, eps, r0, wind)
        return d + offset

    a, b = float(bracket[0]), float(bracket[1])
    if not (0.0 < a < b):
        raise InvalidSpec(f"bad bracket {bracket}")
    fa, fb = defect(a), defect(b)
    if fa == 0.0:
        root = a
    elif fb == 0.0:
        root = b
    elif fa * fb > 0.0:
        raise NoRoot(f"closure defect has no sign change on [{a}, {b}] "
                     f"(defect({a})={fa:.3g}, defect({b})={fb:.3g})")
    else:
        root = brentq(defect, a, b, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    # the round profile solves the closure exactly and is a triple root of
    # the defect; a bracket root within integration noise of it IS the circle
    r_circle = np.sqrt(2.0 * n / eps)
    if rot == wind and abs(root - r_circle) <= 1e-3 * r_circle:
        root = r_circle
    final_defect, r_end = _closure_defect(n, eps, root, wind)
    if abs(final_defect + offset) > 1e-6:
        raise NotClosed(f"defect {final_defect + offset:.3g} above 1e-6 at r_start={root}")
    if abs(r_end - root) > 1e-6 * root:
        raise NotClosed(f"tangent realigns at r_start={root:.6g} without radial closure "
                        f"(|r_end - r_start| = {abs(r_end - root):.3g}); the bracket "
                        "selected an odd half-oscillation count")

    phi = TWO_PI * wind * np.arange(N) / N
    curve = from_complex(_sample_polar(n, eps, root, wind, phi), n)
    curve = resample_arclength(curve)
    spec = ShrinkerSpec(n=n, eps=eps, r_start=float(root),
                        target_rot_wind=(rot, wind))
    return spec, curve


def _sample_polar(n, eps, r_start, wind, phi):
    """Sample the profile z at the given accumulated polar angles."""
    sol = _shoot(n, eps, r_start, wind, dense=True)
    s_dense = np.linspace(0.0, sol.t[-1], 16 * len(phi))
    u = sol.sol(s_dense)
    a = u[3]
    s_at = np.interp(phi, a, s_dense)
    x, y, _, _ = sol.sol(s_at)
    return x + 1j * y


def spec_p_value(spec: ShrinkerSpec) -> float:
    """First integral of the profile started at (r_start, 0)."""
    r = spec.r_start
    return 0.5 * spec.eps * r * np.exp(-0.25 * spec.eps * r * r) * r ** (spec.n - 1)


def catalogue_rows(entries) -> str:
    """CSV catalogue `n,eps,rot,wind,r_min,r_max,p_value` for closed shrinkers."""
    lines = ["n,eps,rot,wind,r_min,r_max,p_value"]
    for spec, curve in entries:
        r = curve.r
        rot, wind = spec.target_rot_wind
        lines.append(f"{spec.n},{spec.eps:.17g},{rot},{wind},"
                     f"{r.min():.17g},{r.max():.17g},{spec_p_value(spec):.17g}")
    return "\n".join(lines) + "\n"
