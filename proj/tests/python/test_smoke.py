import math

import pytest

import geoflow


def test_catalog():
    assert set(geoflow.catalog_names()) == {"flat", "hemisphere", "trough", "c21_cubic", "c2alpha", "vee"}
    s = geoflow.make_surface("vee")
    assert s.dim == 2 and s.codim == 1 and s.regularity == "C11"
    assert s.hess_sup == pytest.approx(2.0)
    with pytest.raises(geoflow.UnknownSurface):
        geoflow.make_surface("nosuch")
    with pytest.raises(geoflow.GeoflowError):
        geoflow.make_surface("nosuch")


def test_sphere_geometry():
    s = geoflow.make_surface("hemisphere")
    assert s.embed([0.3, 0.0])[2] == pytest.approx(math.sqrt(0.91))
    assert s.metric([0.3, 0.0])[0, 0] == pytest.approx(1.0989010989)
    assert geoflow.sectional_curvature(s, [0.1, 0.2], [1, 0], [0, 1]) == pytest.approx(1.0)
    with pytest.raises(geoflow.OutOfChart):
        s.embed([0.9, 0.0])


def test_exp_and_flow():
    s = geoflow.make_surface("hemisphere")
    assert geoflow.exp_map(s, [0, 0], [0.5, 0])[0] == pytest.approx(math.sin(0.5), abs=1e-10)
    run = geoflow.integrate_geodesic(s, [0, 0], [1, 0], 3.0)
    assert run["exit_reason"] == "LeftChart"
    assert run["times"][-1] == pytest.approx(math.asin(0.8))
    assert run["states"].shape[1] == 4
    with pytest.raises(geoflow.OutOfDomain):
        geoflow.geodesic_flow(s, 3.0, [0, 0], [1, 0])


def test_jacobi():
    s = geoflow.make_surface("hemisphere")
    d = geoflow.flow_differential(s, 0.4, [0.1, 0.0], [0.5, 0.5])
    fd = geoflow.fd_flow_differential(s, 0.4, [0.1, 0.0], [0.5, 0.5])
    assert abs(d - fd).max() < 1e-5
    jk = geoflow.propagate_jacobi(s, [0, 0], [1, 0], [0, 0], [0, 1], 0.5)
    assert jk[1] == pytest.approx(math.sin(0.5), abs=1e-9)


def test_minimality():
    flat = geoflow.make_surface("flat")
    assert geoflow.shortest_path_length(flat, [0, 0], [0.5, 0]) == pytest.approx(0.5, abs=0.02)
    assert geoflow.minimality_margin(flat, [0, 0], [1, 0], 0.4) >= 0.0
    assert geoflow.curve_length(flat, [[0, 0], [0.6, 0], [0.6, 0.4]]) == pytest.approx(1.0)


def test_mollify():
    vee = geoflow.make_surface("vee")
    smooth = geoflow.mollify(vee, 0.1, region=0.5)
    assert smooth.regularity == "smooth"
    assert 0.09 < smooth.height([0.3, 0.0])[0] < 0.09 + 0.1**2


def test_criterion():
    assert geoflow.criterion_ids() == list(range(1, 12))
    r = geoflow.run_criterion(1)
    assert r["passed"] is True
    assert r["name"] == "sphere-exp"
