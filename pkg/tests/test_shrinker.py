import numpy as np
import pytest

from lagflow.errors import InvalidSpec, NoReturn, NoRoot, NotClosed, OriginContact
from lagflow.flow import FlowConfig, run
from lagflow.geometry import geometry
from lagflow.shrinker import (ShrinkerSpec, catalogue_rows, first_integral,
                              integrate_profile, shoot_closed, shrinker_curvature,
                              spec_p_value)
from lagflow.topology import hausdorff_distance, predicates, topology


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        ShrinkerSpec(n=2, eps=0.0)
    with pytest.raises(InvalidSpec):
        ShrinkerSpec(n=2, eps=4.0, r_start=-1.0)


def test_curvature_on_circle_point():
    spec = ShrinkerSpec(n=2, eps=4.0)
    # f = (eps/2) <z, nu> = 2, k = (1 - 2(n-1)/(eps |z|^2)) f = 1
    assert abs(float(shrinker_curvature([1.0, 0.0], [1.0, 0.0], spec)) - 1.0) < 1e-14


def test_curvature_vanishes_on_critical_radius():
    spec = ShrinkerSpec(n=3, eps=2.0)
    rc = np.sqrt(2.0 * (3 - 1) / 2.0)
    for nu in ([1.0, 0.0], [0.6, 0.8], [0.0, -1.0]):
        k = float(shrinker_curvature([rc, 0.0], nu, spec))
        assert abs(k) < 1e-12


def test_curvature_vanishes_for_radial_normalless_position():
    # <z, nu> = 0 (line through the origin) forces k = 0
    spec = ShrinkerSpec(n=2, eps=4.0)
    assert abs(float(shrinker_curvature([0.7, 0.0], [0.0, 1.0], spec))) < 1e-14


def test_curvature_rotation_equivariance(rng):
    spec = ShrinkerSpec(n=2, eps=4.0)
    for _ in range(20):
        a = rng.uniform(0, 2 * np.pi)
        z = rng.uniform(0.2, 2.0) * np.array([np.cos(a), np.sin(a)])
        b = rng.uniform(0, 2 * np.pi)
        nu = np.array([np.cos(b), np.sin(b)])
        phi = rng.uniform(0, 2 * np.pi)
        R = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        k1 = float(shrinker_curvature(z, nu, spec))
        k2 = float(shrinker_curvature(R @ z, R @ nu, spec))
        assert abs(k1 - k2) < 1e-14


def test_curvature_origin_contact():
    with pytest.raises(OriginContact):
        shrinker_curvature([0.0, 0.0], [1.0, 0.0], ShrinkerSpec(n=2, eps=4.0))


def test_profile_circle_first_integral():
    spec = ShrinkerSpec(n=2, eps=4.0, r_start=1.0)
    res = integrate_profile(spec)
    assert res.returned
    assert abs(res.s_return - np.pi) < 1e-8            # half circle
    assert np.max(np.abs(res.p - 2.0 / np.e)) < 1e-8   # n R^{n-2} e^{-n/2}
    assert res.p_drift < 1e-8


def test_profile_oscillating_p_constant():
    spec = ShrinkerSpec(n=2, eps=4.0, r_start=1.35)
    res = integrate_profile(spec)
    assert res.p_drift < 1e-8
    # curvature changes sign exactly on |z| = sqrt(2(n-1)/eps)
    assert res.k_signflip_radius_err is not None
    assert res.k_signflip_radius_err < 1e-3


def test_profile_expander_no_return():
    with pytest.raises(NoReturn):
        integrate_profile(ShrinkerSpec(n=2, eps=-2.0, r_start=1.0, arc_steps=512))


def test_shoot_circle():
    spec, curve = shoot_closed(2, 4.0, (1, 1), (0.8, 1.2), N=256)
    assert abs(spec.r_start - 1.0) < 1e-6
    assert np.max(np.abs(curve.r - 1.0)) < 1e-6
    f = geometry(curve, 2)
    p = predicates(curve, f)
    assert p["tamed"] and p["starshaped"]
    t = topology(curve, f, 2)
    assert abs(t.eps_monotone - 4.0) / 4.0 < 1e-4


def test_shoot_flower():
    spec, curve = shoot_closed(2, 4.0, (2, 2), (1.85, 1.99), N=512)
    f = geometry(curve, 2)
    p = predicates(curve, f, lagrangian=False)
    assert p["tamed"] and p["starshaped"]
    t = topology(curve, f, 2)
    assert (t.wind0, t.rot) == (2, 2)
    assert abs(t.eps_monotone - 4.0) / 4.0 < 1e-4
    # curvature really changes sign on the flower (non-convex shrinker)
    assert f.k.min() < 0 < f.k.max()


def test_shoot_no_root_and_bad_targets():
    with pytest.raises(NoRoot):
        shoot_closed(2, 4.0, (1, 1), (1.05, 1.2))
    with pytest.raises(NoRoot):
        shoot_closed(2, 4.0, (2, 1), (0.8, 1.2))       # rot != wind impossible
    with pytest.raises(NoRoot):
        shoot_closed(2, -4.0, (1, 1), (0.8, 1.2))      # expanders never close


def test_shoot_rejects_odd_half_oscillation():
    with pytest.raises(NotClosed):
        shoot_closed(2, 4.0, (2, 2), (2.10, 2.20), N=128)


def test_shrinker_is_flow_invariant():
    spec, curve = shoot_closed(2, 4.0, (1, 1), (0.8, 1.2), N=256)
    eps = 4.0
    cfg = FlowConfig(n=2, cfl=0.3, t_max=0.8 / eps, record_every=10 ** 9,
                     stop_min_r=1e-6)
    rec, rep, fin = run(curve, cfg)
    lam = np.sqrt(1.0 - eps * fin.t)
    assert hausdorff_distance(fin.curve.points, curve.points * lam) < 1e-2


def test_catalogue_csv():
    spec, curve = shoot_closed(2, 4.0, (1, 1), (0.8, 1.2), N=256)
    text = catalogue_rows([(spec, curve)])
    lines = text.strip().split("\n")
    assert lines[0] == "n,eps,rot,wind,r_min,r_max,p_value"
    cells = lines[1].split(",")
    assert cells[0] == "2" and cells[2] == "1" and cells[3] == "1"
    assert abs(float(cells[6]) - 2.0 / np.e) < 1e-9
