import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinstab import geometry as g
from oracles import catenoid_ricci, model_log_derivative_prime

PI = np.pi


# -- curvature examples -----------------------------------------------------------------

def test_cylinder_is_flat():
    s = g.cylinder(1.0, 0.0, 2.0)
    r = s.grid(64)
    assert np.all(g.ricci_revolution(s, r) == 0.0)
    bd = g.boundary_data(s)
    assert (bd.H_inner, bd.H_outer) == (0.0, 0.0)
    assert bd.L_inner == pytest.approx(2 * PI, abs=1e-15)
    assert bd.L_outer == pytest.approx(2 * PI, abs=1e-15)


def test_sphere_profile_ricci():
    s = g.sphere_zone(0.5, 2.5)
    assert float(g.ricci_revolution(s, PI / 4)) == pytest.approx(1.0, abs=1e-15)


def test_catenoid_ricci_against_symbolic_oracle():
    s = g.catenoid(1.0, 0.0, 2.0)
    assert float(s.ricci(1.0)) == pytest.approx(-1.0, abs=1e-15)
    for r in (0.1, 0.7, 1.3, 1.9):
        assert float(s.ricci(r)) == pytest.approx(catenoid_ricci(r), abs=1e-13)


@pytest.mark.parametrize("name,m,r,expected", [
    ("hyperbolic", 2, 1.0, -1.0),
    ("euclidean", 3, 2.0, 0.0),
    ("sphere", 3, PI / 3, 2.0),
])
def test_model_ricci(name, m, r, expected):
    assert float(g.ricci_model(g.MODELS[name](m), r)) == pytest.approx(expected, abs=1e-14)


def test_geodesic_curvature_examples():
    assert float(g.geodesic_curvature(g.cylinder(2.0, 0, 1), 0.3)) == 0.0
    e = g.exponential(-2.0, 0.0)
    assert np.allclose(g.geodesic_curvature(e, e.grid(8)), 1.0, atol=1e-15)
    c = g.catenoid(1.0, 0.0, 2.0)
    assert float(g.geodesic_curvature(c, 1.5)) == pytest.approx(0.4, abs=1e-15)


def test_convexity_indicator_examples():
    assert np.all(g.convexity_indicator(g.cylinder(1, 0, 1), np.linspace(0, 1, 9)) == 0.0)
    assert float(g.convexity_indicator(g.catenoid(1.0, 0.0, 2.0), 1.0)) == pytest.approx(1.0, abs=1e-15)
    e = g.exponential(-2.0, 0.0)
    assert np.max(np.abs(g.convexity_indicator(e, e.grid(16)))) < 1e-14


def test_boundary_data_examples():
    s = g.sphere_zone(PI / 4, PI / 2)
    assert s.boundary().H_outer == pytest.approx(0.0, abs=1e-15)
    c = g.catenoid(1.0, 0.0, 2.0)
    assert c.boundary().H_outer == pytest.approx(-0.5, abs=1e-15)
    # outward normal at the inner end points toward decreasing r
    assert c.boundary().H_inner == pytest.approx(-0.5, abs=1e-15)


@pytest.mark.parametrize("name,m,R,expected", [
    ("euclidean", 2, 1.0, (2 * PI, PI)),
    ("euclidean", 3, 2.0, (16 * PI, 32 * PI / 3)),
    ("sphere", 2, PI / 2, (2 * PI, 2 * PI)),
])
def test_model_area_volume(name, m, R, expected):
    area, vol = g.model_area_volume(g.MODELS[name](m), R)
    assert area == pytest.approx(expected[0], rel=1e-12)
    assert vol == pytest.approx(expected[1], rel=1e-9)


@pytest.mark.parametrize("name", ["euclidean", "sphere", "hyperbolic"])
def test_model_log_derivative_is_decreasing(name):
    # -(phi'/phi)' > 0 is the convexity hypothesis of the model-manifold criterion
    ann = g.ModelAnnulus(g.MODELS[name](2), 0.4, 1.4)
    for r in (0.5, 0.9, 1.3):
        ref = model_log_derivative_prime(name, r)
        assert float(ann.drift_prime(r)) == pytest.approx(ref, rel=1e-10)
        assert ref < 0


def test_model_annulus_weight_derivatives_match_finite_differences():
    for name in ("euclidean", "sphere", "hyperbolic"):
        for m in (2, 3, 4):
            ann = g.ModelAnnulus(g.MODELS[name](m), 0.5, 1.5)
            r, h = np.linspace(0.6, 1.4, 9), 1e-5
            fd1 = (ann.weight(r + h) - ann.weight(r - h)) / (2 * h)
            fd2 = (ann.dweight(r + h) - ann.dweight(r - h)) / (2 * h)
            np.testing.assert_allclose(ann.dweight(r), fd1, rtol=1e-8)
            np.testing.assert_allclose(ann.ddweight(r), fd2, rtol=1e-7, atol=1e-9)


# -- Bochner identity -----------------------------------------------------------------

def test_bochner_constant_function():
    s = g.catenoid(1.0, 0.0, 1.8)
    r = s.grid(64)
    assert g.bochner_residual(s, np.full_like(r, 3.0), r) == 0.0


@pytest.mark.parametrize("surface,u", [
    (g.cylinder(1.0, 0.0, 2.0), np.sin),
    (g.exponential(-2.0, 0.0), lambda r: r**3),
])
def test_bochner_second_order(surface, u):
    res = [g.bochner_residual(surface, u(surface.grid(n)), surface.grid(n)) for n in (64, 128, 256)]
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.1)
    assert res[1] / res[2] == pytest.approx(4.0, rel=0.05)


def test_bochner_quadratic_on_exponential_profile_is_exact():
    # constant drift and a quadratic u: every centred difference is exact
    s = g.exponential(-2.0, 0.0)
    for n in (64, 128):
        r = s.grid(n)
        assert g.bochner_residual(s, r**2, r) < 1e-10


# -- invariants and validation ------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.5), st.floats(0.2, 2.0))
def test_catenoid_unit_speed_and_positive(lo, span):
    s = g.catenoid(1.0, lo, lo + span)
    r = s.grid(32)
    assert np.all(s.psi(r) > 0)
    assert np.all(np.abs(s.dpsi(r)) <= 1.0)
    np.testing.assert_allclose(s.dpsi(r) ** 2 + s.chi_prime(r) ** 2, 1.0, rtol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.5, 3.0))
def test_cone_curvature_vanishes(k, c):
    s = g.cone(c, k, 0.0, 0.4)
    assert np.all(s.ricci(s.grid(8)) == 0.0)


def test_geometry_errors():
    with pytest.raises(g.GeometryError):
        g.cylinder(-1.0)
    with pytest.raises(g.GeometryError):
        g.cone(1.0, 1.5)
    with pytest.raises(g.GeometryError):
        g.sphere_zone(0.0, 1.0)
    with pytest.raises(g.GeometryError):
        g.catenoid().psi(5.0)
    with pytest.raises(g.GeometryError):
        # psi = 2 r is not unit speed
        g.ProfileSurface(lambda r: 1 + 2 * r, lambda r: 2 + 0 * r, lambda r: 0 * r, 0.0, 1.0)
    with pytest.raises(g.GeometryError):
        # wrong second derivative is caught by the finite-difference spot check
        g.ProfileSurface(lambda r: 2 + 0.5 * np.sin(r), lambda r: 0.5 * np.cos(r),
                         lambda r: 0 * r, 0.0, 1.0)
    with pytest.raises(g.GeometryError):
        g.ModelManifold(np.cos, np.sin, np.cos, 2)
    with pytest.raises(g.GeometryError):
        g.ModelAnnulus(g.round_sphere(2), 1.0, 4.0)


def test_from_samples_recovers_profile():
    r = np.linspace(0.0, 2.0, 401)
    s = g.ProfileSurface.from_samples(r, np.sqrt(1 + (r - 1) ** 2))
    x = np.linspace(0.2, 1.8, 7)
    ref = g.catenoid(1.0, 0.0, 2.0)
    np.testing.assert_allclose(s.dpsi(x), ref.dpsi(x), atol=1e-8)
    np.testing.assert_allclose(s.ricci(x), ref.ricci(x), atol=1e-6)


@pytest.mark.parametrize("spec", [
    {"kind": "cylinder", "interval": [0, 3], "params": {"c": 2.0}},
    {"kind": "catenoid", "interval": [0, 1.8]},
    {"kind": "cone", "params": {"c": 1.0, "k": 0.5}},
    {"kind": "model", "interval": [0.5, 1.5], "params": {"model": "hyperbolic", "dim": 3}},
    {"kind": "plane", "interval": [1, 2]},
])
def test_build_domain_roundtrips_through_spec(spec):
    dom = g.build_domain(spec)
    again = g.build_domain(dom.spec)
    assert again.spec == dom.spec
    r = dom.grid(16)
    np.testing.assert_array_equal(again.weight(r), dom.weight(r))


def test_build_domain_errors():
    for spec in ({"kind": "torus"}, {"kind": "model"}, {"kind": "cylinder", "params": {"radius": 1}},
                 {"kind": "model", "interval": [0.5, 1], "params": {"model": "flat"}}):
        with pytest.raises(g.GeometryError):
            g.build_domain(spec)


def test_plane_annulus_paths_share_boundary_data():
    pa = g.PlaneAnnulus(1.0, 2.0)
    bs, bm = pa.as_surface().boundary(), pa.as_model().boundary()
    for k in ("H_inner", "H_outer", "L_inner", "L_outer"):
        assert getattr(bs, k) == pytest.approx(getattr(bm, k), rel=1e-15)
    # the planar curvature of the inner circle (toward the region) is -1/r0 = -H_inner
    assert pa.kappa_inner == pytest.approx(-bs.H_inner)
    assert pa.kappa_outer == pytest.approx(-bs.H_outer)


def test_volume_quadrature():
    s = g.sphere_zone(0.5, 2.5)
    assert s.area() == pytest.approx(2 * PI * (np.cos(0.5) - np.cos(2.5)), rel=1e-10)
    ann = g.ModelAnnulus(g.hyperbolic(2), 0.5, 1.5)
    assert ann.volume() == pytest.approx(2 * PI * (np.cosh(1.5) - np.cosh(0.5)), rel=1e-10)
