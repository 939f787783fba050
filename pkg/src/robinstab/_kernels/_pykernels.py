"""Pure-Python versions of the compiled kernels (same signatures, same arithmetic)."""

import numpy as np
from numpy.polynomial import polynomial as npoly


def _count(d, e2, x, guard=1e-300):
    q = d[0] - x
    if q == 0.0:
        q = -guard
    neg = 1 if q < 0.0 else 0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if q == 0.0:
            q = -guard
        if q < 0.0:
            neg += 1
    return neg


def sturm_count(d, e2, x):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x."""
    return _count(np.asarray(d).tolist(), np.asarray(e2).tolist(), float(x))


def bisect_smallest(d, e2, lo, hi, tol, max_iter):
    """Shrink [lo, hi] around the smallest eigenvalue; returns (lo, hi, iterations)."""
    d = np.asarray(d).tolist()
    e2 = np.asarray(e2).tolist()
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count(d, e2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        it += 1
    return lo, hi, it


def tridiag_solve(sub, diag, sup, rhs):
    """Thomas algorithm; zero pivots are nudged so shifted solves stay finite."""
    sub = np.asarray(sub).tolist()
    diag = np.asarray(diag).tolist()
    sup = np.asarray(sup).tolist()
    rhs = np.asarray(rhs).tolist()
    n = len(diag)
    scale = max(abs(v) for v in diag)
    guard = 1e-14 * scale if scale > 0 else 1e-300
    cp = [0.0] * n
    x = [0.0] * n
    piv = diag[0]
    if abs(piv) < guard:
        piv = guard
    cp[0] = sup[0] / piv if n > 1 else 0.0
    x[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if abs(piv) < guard:
            piv = guard
        if i < n - 1:
            cp[i] = sup[i] / piv
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return np.array(x)


def rk4_linear(p, q, h, y0, dy0):
    """Integrate y'' = -p y' - q y with RK4 on the half-step lattice of p, q.

    Returns (y, y', int y) on the full-step nodes.
    """
    p = np.asarray(p).tolist()
    q = np.asarray(q).tolist()
    m = (len(p) - 1) // 2
    y = [0.0] * (m + 1)
    dy = [0.0] * (m + 1)
    iy = [0.0] * (m + 1)
    y[0] = float(y0)
    dy[0] = float(dy0)
    for j in range(m):
        a, b, c = y[j], dy[j], iy[j]
        p0, p1, p2 = p[2 * j], p[2 * j + 1], p[2 * j + 2]
        q0, q1, q2 = q[2 * j], q[2 * j + 1], q[2 * j + 2]
        k1y = b
        k1d = -p0 * b - q0 * a
        k2y = b + 0.5 * h * k1d
        k2d = -p1 * k2y - q1 * (a + 0.5 * h * k1y)
        k3y = b + 0.5 * h * k2d
        k3d = -p1 * k3y - q1 * (a + 0.5 * h * k2y)
        k4y = b + h * k3d
        k4d = -p2 * k4y - q2 * (a + h * k3y)
        y[j + 1] = a + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        dy[j + 1] = b + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        iy[j + 1] = c + h / 6.0 * (a + 2.0 * (a + 0.5 * h * k1y)
                                   + 2.0 * (a + 0.5 * h * k2y) + (a + h * k3y))
    return np.array(y), np.array(dy), np.array(iy)


def invert_bridge(u, zk, tk, cI, c0, c1, z0, L, iters):
    """Solve z0 + I(t) = u on [0, L] (I' = P > 0): table interpolation then Newton.

    Returns (t, P(t), P'(t)).
    """
    u = np.asarray(u, dtype=float)
    t = np.interp(u, zk, tk)
    for _ in range(iters):
        t = np.clip(t - (z0 + npoly.polyval(t, cI) - u) / npoly.polyval(t, c0), 0.0, L)
    return t, npoly.polyval(t, c0), npoly.polyval(t, c1)
