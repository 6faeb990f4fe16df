import numpy as np
import pytest

from lagflow.curve import (DiscreteCurve, chord_lengths, from_complex,
                           read_curve_csv, read_curve_json, resample_arclength,
                           spline_length, write_curve_csv, write_curve_json)
from lagflow.errors import DegenerateSegment, InvalidSpec, OriginContact
from lagflow.geometry import geometry
from lagflow.topology import topology

from conftest import make_circle, make_ellipse, grid


def test_minimum_node_count():
    z = np.exp(1j * grid(8))
    with pytest.raises(InvalidSpec):
        from_complex(z, 2)


def test_origin_contact_rejected_for_n_ge_2():
    pts = np.column_stack([np.cos(grid(32)), np.sin(grid(32))])
    pts[3] = (0.0, 0.0)
    with pytest.raises(OriginContact):
        DiscreteCurve(points=pts, n_ambient=2)
    DiscreteCurve(points=pts, n_ambient=1)  # allowed for n = 1


def test_duplicate_nodes_rejected():
    pts = np.column_stack([np.cos(grid(32)), np.sin(grid(32))])
    pts[5] = pts[4]
    with pytest.raises(DegenerateSegment):
        DiscreteCurve(points=pts, n_ambient=1)


def test_points_are_immutable():
    c = make_circle(32)
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0


def test_csv_roundtrip_bit_exact(tmp_path, rng):
    z = np.exp(1j * grid(64)) * (1.0 + 0.3 * rng.standard_normal(64) * 1e-2)
    c = from_complex(z + (rng.standard_normal(64) + 1j) * 1e-3, 2)
    path = tmp_path / "curve.csv"
    write_curve_csv(c, path)
    c2 = read_curve_csv(path, n_ambient=2)
    assert np.array_equal(c.points, c2.points)


def test_json_roundtrip_bit_exact(tmp_path, rng):
    z = np.exp(1j * grid(48)) * (1.0 + 1e-2 * rng.standard_normal(48))
    c = from_complex(z, 3)
    path = tmp_path / "curve.json"
    write_curve_json(c, path)
    c2 = read_curve_json(path)
    assert c2.n_ambient == 3
    assert np.array_equal(c.points, c2.points)


def test_resample_circle_is_noop():
    c = make_circle(256)
    c2 = resample_arclength(c)
    assert np.max(np.abs(c2.points - c.points)) < 1e-8


def test_resample_equalizes_ellipse_chords():
    c = make_ellipse(512)
    c2 = resample_arclength(c)
    ch = chord_lengths(c2)
    assert ch.max() / ch.min() <= 1.0 + 1e-5


def test_resample_preserves_length():
    c = make_ellipse(512)
    c2 = resample_arclength(c)
    # length of the underlying smooth curve, via the spline of each polyline
    L1 = spline_length(c.z)
    L2 = spline_length(c2.z)
    assert abs(L1 - L2) / L1 < 1e-8


def test_resample_preserves_area_and_indices():
    c = make_ellipse(256)
    t1 = topology(c, geometry(c, 2), 2)
    c2 = resample_arclength(c)
    t2 = topology(c2, geometry(c2, 2), 2)
    assert abs(t2.area - t1.area) / abs(t1.area) < 1e-6
    assert (t2.wind0, t2.rot) == (t1.wind0, t1.rot)


def test_resample_rejects_degenerate():
    pts = np.column_stack([np.cos(grid(32)), np.sin(grid(32))])
    pts[7] = pts[6] + 1e-16
    c = DiscreteCurve(points=pts, n_ambient=1)
    with pytest.raises(DegenerateSegment):
        resample_arclength(c)
