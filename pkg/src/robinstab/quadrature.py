"""Small numerical helpers shared across modules: adaptive Simpson and 4th-order differences."""

import numpy as np
from scipy.integrate import simpson


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=50):
    """Integrate a scalar function on [a, b] by adaptive Simpson with Richardson correction."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # explicit stack keeps deep refinement off the Python recursion limit
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    return total


def integrate_samples(y, r):
    """Composite Simpson on a sampled grid (uniform or not)."""
    return float(simpson(np.asarray(y, dtype=float), x=np.asarray(r, dtype=float)))


def trapezoid_weights(r):
    r = np.asarray(r, dtype=float)
    w = np.zeros_like(r)
    dr = np.diff(r)
    w[:-1] += 0.5 * dr
    w[1:] += 0.5 * dr
    return w


# 5-point stencils: centred, and one-sided for the two points at each end
_D1_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D1_EDGE = {
    0: np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    1: np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
}
_D2_CENTRAL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D2_EDGE = {
    # 6-point one-sided stencils keep 4th order at the ends
    0: np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0,
    1: np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0,
}


def derivative4(y, h):
    """First derivative on a uniform grid, 4th order everywhere (needs >= 5 points)."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 5:
        raise ValueError("derivative4 needs at least 5 samples")
    d = np.empty(n)
    d[2:-2] = (y[:-4] * _D1_CENTRAL[0] + y[1:-3] * _D1_CENTRAL[1]
               + y[3:-1] * _D1_CENTRAL[3] + y[4:] * _D1_CENTRAL[4])
    d[0] = _D1_EDGE[0] @ y[:5]
    d[1] = _D1_EDGE[1] @ y[:5]
    d[-1] = -(_D1_EDGE[0] @ y[-1:-6:-1])
    d[-2] = -(_D1_EDGE[1] @ y[-1:-6:-1])
    return d / h


def second_derivative4(y, h):
    """Second derivative on a uniform grid, 4th order everywhere (needs >= 6 points)."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 6:
        raise ValueError("second_derivative4 needs at least 6 samples")
    d = np.empty(n)
    d[2:-2] = (y[:-4] * _D2_CENTRAL[0] + y[1:-3] * _D2_CENTRAL[1] + y[2:-2] * _D2_CENTRAL[2]
               + y[3:-1] * _D2_CENTRAL[3] + y[4:] * _D2_CENTRAL[4])
    d[0] = _D2_EDGE[0] @ y[:6]
    d[1] = _D2_EDGE[1] @ y[:6]
    d[-1] = _D2_EDGE[0] @ y[-1:-7:-1]
    d[-2] = _D2_EDGE[1] @ y[-1:-7:-1]
    return d / h**2
