"""Acceptance criteria, one test each; the terminal summary prints a pass/fail line per criterion."""

import json
import time

import numpy as np
import pytest
import yaml

from robinstab import cli, criteria
from robinstab import evolution as E
from robinstab import geometry as g
from robinstab import nonlinearity as N
from robinstab import spectrum, stationary
from oracles import robin_interval_lambda1

PI = np.pi


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f} s (budget {self.seconds} s)"


@pytest.mark.acceptance(1, "geometry exactness")
def test_geometry_exactness():
    with Budget(1):
        cyl = g.cylinder(1.0, 0.0, 2.0)
        r = cyl.grid(256)
        assert np.max(np.abs(cyl.ricci(r))) <= 1e-12
        bd = cyl.boundary()
        assert abs(bd.H_inner) <= 1e-12 and abs(bd.H_outer) <= 1e-12
        for m in (2, 3, 4):
            sph = g.round_sphere(m)
            rr = np.linspace(0.1, PI - 0.1, 200)
            assert np.max(np.abs(sph.ricci_radial(rr) - (m - 1))) <= 1e-12


@pytest.mark.acceptance(2, "Bochner residual is second order")
def test_bochner_second_order():
    funcs = {"sin": np.sin, "cube": lambda r: r**3, "damped": lambda r: np.exp(-r) * np.cos(2 * r)}
    surfaces = {"cylinder": g.cylinder(1.0, 0.0, 2.0), "catenoid": g.catenoid(1.0, 0.0, 1.8),
                "exponential": g.exponential(-2.0, 0.0)}
    ns = np.array([64, 128, 256])
    with Budget(5):
        for sname, s in surfaces.items():
            for fname, u in funcs.items():
                res = [g.bochner_residual(s, u(s.grid(n)), s.grid(n)) for n in ns]
                slope = -np.polyfit(np.log(ns), np.log(res), 1)[0]
                assert abs(slope - 2.0) <= 0.3, (sname, fname, slope)


@pytest.mark.acceptance(3, "Robin eigenvalue on an interval matches the transcendental oracle")
def test_eigen_oracle():
    dom = g.cylinder(1.0, 0.0, 1.0)
    with Budget(10):
        for alpha in (-0.5, 0.0, 1.0):
            lam = spectrum.linear_lambda(dom, alpha, n=2048)
            if alpha == 0.0:
                assert abs(lam) < 1e-10
            else:
                assert lam == pytest.approx(robin_interval_lambda1(alpha, 1.0), abs=1e-6)


@pytest.mark.acceptance(4, "constant test function bound on the principal eigenvalue")
def test_constant_function_bound():
    pairs = [(g.cylinder(1.0, 0.0, 2.0), 0.5), (g.catenoid(1.0, 0.0, 1.8), 1.0),
             (g.sphere_zone(0.5, 2.5), 0.3), (g.exponential(-2.0, 0.0), 2.0),
             (g.ModelAnnulus(g.hyperbolic(3), 0.5, 1.5), 0.7)]
    with Budget(10):
        for dom, alpha in pairs:
            bd = dom.boundary()
            bound = alpha * (bd.L_inner + bd.L_outer) / dom.volume()
            lam = spectrum.linear_lambda(dom, alpha, n=1024)
            assert 0 < lam <= bound + 1e-8, (dom, lam, bound)


@pytest.mark.acceptance(5, "gradient bound for stationary solutions")
def test_gradient_bound(solved_catalogue):
    with Budget(30):
        cases = [c for c in solved_catalogue if c.solution.norm() > 0]
        assert len(cases) >= 10
        assert {np.sign(c.solution.alpha) for c in cases} == {-1.0, 0.0, 1.0}
        for c in cases:
            lhs, rhs, scale = spectrum.gradient_bound(c.domain, c.solution, c.lambda1)
            assert rhs - lhs >= -1e-6 * scale, c.label


@pytest.mark.acceptance(6, "instability criteria are sound and non-vacuous")
def test_criteria_soundness(solved_catalogue):
    with Budget(60):
        holding = set()
        for c in solved_catalogue:
            for v in c.report.verdicts:
                if v.holds == criteria.Holds.YES and v.kind == "instability":
                    assert c.lambda1 <= 1e-6, (c.label, v.criterion, c.lambda1)
                    if v.criterion in ("revolution", "model", "cylinder") and c.lambda1 < -1e-3:
                        holding.add(c.label)
        assert len(holding) >= 3, holding


@pytest.mark.acceptance(7, "stable pattern construction with a negative boundary sum")
def test_pattern_construction(tmp_path):
    from pathlib import Path

    src = Path(__file__).resolve().parents[1] / "configs" / "construct-pattern.yaml"
    cfg = tmp_path / "construct.yaml"
    cfg.write_text(yaml.safe_dump(yaml.safe_load(src.read_text())))
    with Budget(60):
        assert cli.main(["construct-pattern", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    c = json.loads((tmp_path / "out" / "certificate.json").read_text())
    assert c["boundary_sum"] < 0
    assert c["interior_max"] < 0
    assert c["boundary_inner"] > 0 and c["boundary_outer"] > 0
    assert c["barta_passed"]
    assert c["lambda1"] >= 1e-6
    assert c["rederivation"]["max_abs_deviation"] < 1e-5


def _perturbed_rate(dom, f, alpha, sol, n, T, eps=1e-4):
    # u* + eps phi_1 with the principal eigenfunction scaled to unit maximum
    us = E.discrete_equilibrium(dom, f, alpha, E.resample(sol, n), n)
    _, phi = E.principal_mode(dom, f, alpha, us, n)
    run = E.evolve_radial(dom, f, alpha, us + eps * phi, T, n, reference=us)
    return E.classify(run)


@pytest.mark.acceptance(8, "time evolution follows the principal eigenvalue")
def test_dynamics(catenoid_pattern):
    with Budget(120):
        pat = catenoid_pattern
        tr = _perturbed_rate(pat.domain, pat.f, pat.alpha, pat.solution(), 160, 5.0)
        lam = pat.certificate["lambda1"]
        assert tr.trend == E.Trend.DECAY
        assert abs(tr.rate + lam) <= 0.1 * lam

        dom, f, alpha = g.cylinder(1.0, 0.0, 8.0), N.cubic(1.0, -1.0), -0.3
        sols = stationary.solve_stationary(dom, f, alpha, (-1, 1), n_scan=81, n=1024)
        s = max(sols, key=lambda s: s.c)
        lam = spectrum.lambda1_full(dom, s, k_max=2, n=1024).value
        assert lam < 0
        tr = _perturbed_rate(dom, f, alpha, s, 128, 15.0)
        assert tr.trend == E.Trend.GROWTH
        assert abs(tr.rate + lam) <= 0.1 * abs(lam)


@pytest.mark.acceptance(9, "planar boundary functional equals the rotational boundary sum")
def test_planar_consistency():
    ann = g.PlaneAnnulus(1.0, 2.0)
    f = N.cubic(2.0, -1.0)
    with Budget(5):
        surf, model = ann.as_surface(), ann.as_model()
        sols = stationary.solve_stationary(surf, f, 0.5, (-2, 2), n_scan=121, n=1024)
        checked = 0
        for s in sols:
            c0 = criteria.annulus_plane_criteria(ann, s.v[0], s.v[-1], 0.5, f).C0
            w_rev = criteria.revolution_instability(surf, s).witness
            sm = stationary.RadialSolution(s.grid, s.v, s.v_prime, 0.5, model, f)
            w_mod = criteria.model_instability(model, sm).witness
            for w in (w_rev, w_mod):
                assert w == pytest.approx(c0, rel=1e-8, abs=1e-12)
            checked += s.norm() > 0
        assert checked >= 2
        # the identity is pointwise in the boundary values, so it holds for any trace
        rng = np.random.default_rng(0)
        r = surf.grid(16)
        for _ in range(20):
            u0, u1, alpha = rng.uniform(-2, 2, 3)
            v = u0 + (u1 - u0) * (r - r[0]) / (r[-1] - r[0])
            s = stationary.RadialSolution(r, v, np.gradient(v, r), alpha, surf, f)
            c0 = criteria.annulus_plane_criteria(ann, u0, u1, alpha, f).C0
            assert criteria.revolution_instability(surf, s).witness == pytest.approx(c0, rel=1e-8, abs=1e-12)
