import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal, solve_banded

from robinstab import _kernels

py = _kernels.python_backend
cc = _kernels.compiled_backend
BACKENDS = [py] + ([cc] if cc is not None else [])
IDS = ["python"] + (["compiled"] if cc is not None else [])

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def _tridiag(draw_d, draw_e):
    d = np.ascontiguousarray(draw_d, dtype=float)
    e = np.ascontiguousarray(draw_e, dtype=float)
    return d, e


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.lists(finite, min_size=n, max_size=n),
                                                       st.lists(finite, min_size=n - 1, max_size=n - 1))),
       finite)
def test_sturm_count_matches_lapack(k, de, x):
    d, e = _tridiag(*de)
    evals = eigh_tridiagonal(d, e, eigvals_only=True)
    # skip shifts that sit on an eigenvalue, where the count is ambiguous
    if np.min(np.abs(evals - x)) < 1e-8 * (1 + np.max(np.abs(evals))):
        return
    assert k.sturm_count(d, e * e, x) == int(np.sum(evals < x))


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.lists(finite, min_size=n, max_size=n),
                                                       st.lists(finite, min_size=n - 1, max_size=n - 1))))
def test_bisect_smallest_brackets_lowest_eigenvalue(k, de):
    d, e = _tridiag(*de)
    lam = eigh_tridiagonal(d, e, eigvals_only=True)[0]
    lo, hi = -100.0, 100.0
    tol = 1e-12
    a, b, it = k.bisect_smallest(d, e * e, lo, hi, tol, 200)
    assert b - a <= tol
    assert a - 1e-9 <= lam <= b + 1e-9


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-1, 1), min_size=max(n - 1, 1), max_size=max(n - 1, 1)),
    st.lists(st.floats(-1, 1), min_size=max(n - 1, 1), max_size=max(n - 1, 1)),
    st.lists(finite, min_size=n, max_size=n))))
def test_tridiag_solve_diagonally_dominant(k, data):
    sub, sup, rhs = (np.asarray(x, dtype=float) for x in data)
    n = len(rhs)
    sub, sup = sub[: n - 1], sup[: n - 1]
    diag = 3.0 + np.arange(n) * 0.01
    x = k.tridiag_solve(np.ascontiguousarray(sub), np.ascontiguousarray(diag),
                        np.ascontiguousarray(sup), np.ascontiguousarray(rhs))
    ab = np.zeros((3, n))
    ab[0, 1:] = sup
    ab[1] = diag
    ab[2, :-1] = sub
    ref = solve_banded((1, 1), ab, rhs)
    np.testing.assert_allclose(x, ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
def test_rk4_linear_closed_forms(k):
    # y'' = y from y(0) = 0, y'(0) = 1 is sinh; its integral is cosh - 1
    m, h = 200, 0.01
    p = np.zeros(2 * m + 1)
    q = -np.ones(2 * m + 1)
    y, dy, iy = k.rk4_linear(p, q, h, 0.0, 1.0)
    r = h * np.arange(m + 1)
    assert np.max(np.abs(y - np.sinh(r))) < 1e-9
    assert np.max(np.abs(dy - np.cosh(r))) < 1e-9
    assert np.max(np.abs(iy - (np.cosh(r) - 1))) < 1e-8
    # y'' + 2 y' + y = 0 from y = 1, y' = -1 is e^{-r}
    y, dy, _ = k.rk4_linear(np.full(2 * m + 1, 2.0), np.ones(2 * m + 1), h, 1.0, -1.0)
    assert np.max(np.abs(y - np.exp(-r))) < 1e-9


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.05, 1.0), min_size=3, max_size=6), st.floats(0.0, 5.0))
def test_invert_bridge_solves_the_integral_equation(k, coeffs, z0):
    c0 = np.asarray(coeffs, dtype=float)        # P > 0 on [0, L] since all coefficients are positive
    cI = np.r_[0.0, c0 / np.arange(1, len(c0) + 1)]
    c1 = c0[1:] * np.arange(1, len(c0))
    L = 0.7
    tk = np.linspace(0.0, L, 50)
    zk = z0 + np.polynomial.polynomial.polyval(tk, cI)
    t_true = np.linspace(0.0, L, 33)
    u = z0 + np.polynomial.polynomial.polyval(t_true, cI)
    t, P, dP = k.invert_bridge(u, zk, tk, cI, c0, c1, z0, L, 4)
    np.testing.assert_allclose(t, t_true, atol=1e-12)
    np.testing.assert_allclose(P, np.polynomial.polynomial.polyval(t_true, c0), rtol=1e-12)
    np.testing.assert_allclose(dP, np.polynomial.polynomial.polyval(t_true, c1), rtol=1e-12, atol=1e-13)


@pytest.mark.skipif(cc is None, reason="compiled backend not built")
def test_backends_agree_on_a_realistic_problem():
    from robinstab import geometry, spectrum

    dom = geometry.catenoid(1.0, 0.0, 1.8)
    prob = spectrum.discretize(dom, None, 0, 512, alpha=-0.5, fprime=np.full(513, 2.0))
    d, e, _ = prob.standard_form()
    d, e = np.ascontiguousarray(d), np.ascontiguousarray(e)
    e2 = e * e
    args = (d, e2, -1e4, 1e4, 1e-12, 400)
    assert py.bisect_smallest(*args)[:2] == pytest.approx(cc.bisect_smallest(*args)[:2], abs=1e-11)
    rhs = np.linspace(1.0, 2.0, len(d))
    np.testing.assert_allclose(py.tridiag_solve(e, d + 50.0, e, rhs),
                               cc.tridiag_solve(e, d + 50.0, e, rhs), rtol=1e-12)


def test_backend_flag():
    assert _kernels.BACKEND in ("compiled", "python")
    assert (_kernels.BACKEND == "compiled") == (cc is not None)
