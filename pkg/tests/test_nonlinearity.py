import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinstab import nonlinearity as N

CASES = [N.zero(), N.linear(2.5), N.cubic(1.0, -1.0), N.cubic(-2.0, 1.0), N.power(1.5, 3.0),
         N.power(0.5, 2.5), N.polynomial([0.0, 1.0, 0.5, -0.25]), N.affine_linear(-1.0, 0.3)]


@pytest.mark.parametrize("f", CASES, ids=lambda f: f.name)
@settings(max_examples=30, deadline=None)
@given(st.floats(-3.0, 3.0))
def test_derivative_and_antiderivative_consistent(f, u):
    h = 1e-5
    assert float(f.f_prime(u)) == pytest.approx(float((f.f(u + h) - f.f(u - h)) / (2 * h)),
                                                rel=1e-6, abs=1e-6)
    assert float(f.F(u + h) - f.F(u - h)) / (2 * h) == pytest.approx(float(f.f(u)), rel=1e-6, abs=1e-6)
    assert float(f.F(0.0)) == 0.0


def test_linear_slope_flag():
    assert N.linear(3.0).linear_slope == 3.0
    assert N.zero().linear_slope == 0.0
    assert N.cubic(1.0, -1.0).linear_slope is None
    assert N.affine_linear(1.0, 0.5).linear_slope is None
    assert N.cubic(2.0, 0.0).linear_slope == 2.0


def test_build_from_spec():
    f = N.build_nonlinearity({"kind": "cubic", "params": {"c1": 2.0, "c3": -1.0}})
    assert float(f(1.0)) == 1.0
    assert N.build_nonlinearity({"kind": "zero"}).f(5.0) == 0.0
    with pytest.raises(ValueError):
        N.build_nonlinearity({"kind": "exotic"})
    with pytest.raises(ValueError):
        N.power(1.0, 1.0)


def test_power_is_odd_and_matches_formula():
    f = N.power(2.0, 3.0)
    u = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(f(u), -4.0 * u + u**3, rtol=1e-15, atol=1e-15)
    np.testing.assert_allclose(f(-u), -f(u), atol=1e-15)
