import numpy as np
import pytest

from lagflow.curve import from_complex
from lagflow.errors import NotStarshaped, OriginContact
from lagflow.geometry import (geometry, identity_residuals, near_origin_ratio,
                              require_curveeq11)

from conftest import TWO_PI, grid, make_circle, make_ellipse, make_wavy


def test_unit_circle_curvature_and_speed():
    c = make_circle(256, R=1.0, n=2)
    f = geometry(c, 2)
    assert np.max(np.abs(f.k - 1.0)) < 1e-3
    assert np.max(np.abs(f.nu - f.e_r)) < 1e-6          # nu = e_r on the circle
    assert np.max(np.abs(f.f - 2.0)) < 1e-3             # f = n/R


def test_circle_radius_two_n3():
    c = make_circle(256, R=2.0, n=3)
    f = geometry(c, 3)
    assert np.max(np.abs(f.f - 1.5)) < 1e-3             # f = n/R = 3/2


def test_ellipse_curvature_closed_form():
    a, b = 2.0, 1.0
    c = make_ellipse(512, a, b)
    f = geometry(c, 2)
    phi = grid(512)
    k_exact = a * b / (b ** 2 * np.cos(phi) ** 2 + a ** 2 * np.sin(phi) ** 2) ** 1.5
    assert abs(f.k[0] - 2.0) < 1e-3
    assert np.max(np.abs(f.k - k_exact)) < 1e-3


def test_field_invariants():
    for c in (make_circle(128), make_ellipse(128), make_wavy(128, 0.2, 4)):
        f = geometry(c, 2)
        assert np.max(np.abs(np.abs(f.nu) - 1.0)) < 1e-12
        dot = f.nu.real * f.tangent.real + f.nu.imag * f.tangent.imag
        assert np.max(np.abs(dot)) < 1e-10
        assert f.nu_dot_er.min() >= -1.0 - 1e-10
        assert f.nu_dot_er.max() <= 1.0 + 1e-10
        # constructional identity, exact
        radial = (f.n - 1) * f.nu_dot_er / f.r
        assert np.array_equal(f.f, f.k + radial)


def test_near_origin_flagging():
    phi = grid(64)
    z = (1.0 + (1e-8 - 1.0) * np.exp(-((phi - np.pi) / 0.2) ** 2)) * np.exp(1j * phi)
    c = from_complex(z, 1)
    assert geometry(c, 1).flagged_near_origin
    with pytest.raises(OriginContact):
        geometry(c, 2)


# --- near-origin diagnostic -------------------------------------------------


def stadium_through_origin(N=512, L=2.0, h=1.0):
    """Closed stadium whose bottom straight edge passes through the origin."""
    seg = 2 * L + np.pi * h  # half: bottom edge + one semicircle
    total = 2 * seg
    s = total * np.arange(N) / N
    pts = np.empty((N, 2))
    for i, si in enumerate(s):
        if si < 2 * L:                       # bottom edge, left to right
            pts[i] = (-L + si, 0.0)
        elif si < 2 * L + np.pi * h:         # right cap
            a = (si - 2 * L) / h
            pts[i] = (L + h * np.sin(a), h - h * np.cos(a))
        elif si < 4 * L + np.pi * h:         # top edge, right to left
            pts[i] = (L - (si - 2 * L - np.pi * h), 2 * h)
        else:                                # left cap
            a = (si - 4 * L - np.pi * h) / h
            pts[i] = (-L - h * np.sin(a), h + h * np.cos(a))
    return DiscreteCurveLike(pts)


def DiscreteCurveLike(pts):
    from lagflow.curve import DiscreteCurve
    return DiscreteCurve(points=pts, n_ambient=1)


def test_near_origin_chord_limit_zero():
    c = stadium_through_origin()
    f = geometry(c, 1)
    res = near_origin_ratio(c, f, window=5)
    assert abs(res["limit"]) < 1e-3


def test_near_origin_circle_through_origin():
    # circle of radius R through the origin: ratio is identically 1/(2R)
    for R in (0.5, 1.0):
        c = make_circle(1024, R=R, center=R + 0j, n=1, offset=0.5)
        f = geometry(c, 1)
        res = near_origin_ratio(c, f, window=5)
        assert abs(res["limit"] - 1.0 / (2 * R)) < 1e-2


def test_near_origin_circle_about_origin_constant():
    c = make_circle(256, R=2.0, n=2)
    f = geometry(c, 2)
    res = near_origin_ratio(c, f, window=4)
    assert np.max(np.abs(res["ratio"] - 0.5)) < 1e-6
    assert abs(res["limit"] - 0.5) < 1e-6


def test_near_origin_window_validation():
    c = make_circle(64)
    with pytest.raises(ValueError):
        near_origin_ratio(c, geometry(c, 2), window=2)


# --- pointwise identities ----------------------------------------------------


def test_identity_residuals_circle():
    # constant r kills all gradients; the only error left is the O(h^4)
    # finite-difference error in k, below 1e-10 from N = 2048 on
    c = make_circle(2048)
    res = identity_residuals(c, geometry(c, 2))
    for key in ("res_10a", "res_10b", "res_10c", "res_curveeq11"):
        assert res[key] < 1e-10


def test_identity_residuals_convergence():
    res = {}
    for N in (256, 512):
        c = make_wavy(N, 0.1, 3)
        res[N] = identity_residuals(c, geometry(c, 2))
    for key in ("res_10a", "res_10b", "res_10c", "res_curveeq11"):
        assert res[256][key] / res[512][key] >= 3.5
    assert res[512]["res_curveeq11"] < 1e-3


def test_curveeq11_oracle_on_polar_graph():
    # both sides of f*sqrt(g) = w0*(n - beta') from the analytic r(phi)
    N, amp, l, n = 512, 0.1, 3, 2
    phi = grid(N)
    r = 1.0 + amp * np.cos(l * phi)
    rp = -amp * l * np.sin(l * phi)
    rpp = -amp * l * l * np.cos(l * phi)
    g = r ** 2 + rp ** 2
    f = (1.0 / np.sqrt(g)) * (n + (rp ** 2 - r * rpp) / g)
    beta_p = (r * rpp - rp ** 2) / g
    lhs = f * np.sqrt(g)
    rhs = n - beta_p
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_curveeq11_requires_starshaped():
    c = make_circle(64, R=1.0, center=3.0 + 0j, n=1)
    res = identity_residuals(c, geometry(c, 1))
    assert res["res_curveeq11"] is None
    with pytest.raises(NotStarshaped):
        require_curveeq11(res)


def test_speed_bound_at_max_radius():
    # at the node of maximal r: f*r >= n - delta_grid
    for c, n in ((make_circle(256, n=2), 2), (make_wavy(256, 0.05, 3, n=3), 3),
                 (make_ellipse(256, 2.0, 1.2, n=2), 2)):
        f = geometry(c, n)
        j = int(np.argmax(f.r))
        assert f.f[j] * f.r[j] >= n - 0.05
