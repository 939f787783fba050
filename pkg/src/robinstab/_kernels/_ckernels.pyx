# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Sturm-count bisection, tridiagonal solve, linear RK4, bridge inversion."""

import numpy as np
from libc.math cimport fabs

cdef double TINY = 1e-300


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2, double x, double guard) nogil:
    cdef Py_ssize_t i, n = d.shape[0], neg = 0
    cdef double q = d[0] - x
    if q == 0.0:
        q = -guard
    if q < 0.0:
        neg += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if q == 0.0:
            q = -guard
        if q < 0.0:
            neg += 1
    return neg


def sturm_count(double[::1] d, double[::1] e2, double x):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x."""
    cdef double guard = 1e-300
    return _count(d, e2, x, guard)


def bisect_smallest(double[::1] d, double[::1] e2, double lo, double hi,
                    double tol, int max_iter):
    """Shrink [lo, hi] around the smallest eigenvalue.

    Returns (lo, hi, iterations). Requires count(lo) == 0 and count(hi) >= 1.
    """
    cdef int it = 0
    cdef double mid
    cdef double guard = 1e-300
    with nogil:
        while hi - lo > tol and it < max_iter:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _count(d, e2, mid, guard) >= 1:
                hi = mid
            else:
                lo = mid
            it += 1
    return lo, hi, it


def tridiag_solve(double[::1] sub, double[::1] diag, double[::1] sup, double[::1] rhs):
    """Thomas algorithm; zero pivots are nudged so shifted solves stay finite."""
    cdef Py_ssize_t i, n = diag.shape[0]
    out = np.empty(n, dtype=np.float64)
    cp_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] cp = cp_arr
    cdef double piv, scale = 0.0
    for i in range(n):
        if fabs(diag[i]) > scale:
            scale = fabs(diag[i])
    cdef double guard = 1e-14 * scale if scale > 0 else TINY
    piv = diag[0]
    if fabs(piv) < guard:
        piv = guard
    cp[0] = sup[0] / piv if n > 1 else 0.0
    x[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if fabs(piv) < guard:
            piv = guard
        if i < n - 1:
            cp[i] = sup[i] / piv
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return out


def rk4_linear(double[::1] p, double[::1] q, double h, double y0, double dy0):
    """Integrate y'' = -p y' - q y with classical RK4.

    p and q are sampled on the half-step lattice (2m + 1 values for m steps).
    The running integral of y is carried as a third state, so it is
    consistent with the RK4 solution to the same order.
    Returns (y, y', int y) on the m + 1 full-step nodes.
    """
    cdef Py_ssize_t j, m = (p.shape[0] - 1) // 2
    ya = np.empty(m + 1)
    dya = np.empty(m + 1)
    ia = np.empty(m + 1)
    cdef double[::1] y = ya
    cdef double[::1] dy = dya
    cdef double[::1] iy = ia
    cdef double a, b, c, k1y, k1d, k2y, k2d, k3y, k3d, k4y, k4d
    cdef double p0, p1, p2, q0, q1, q2
    y[0] = y0
    dy[0] = dy0
    iy[0] = 0.0
    for j in range(m):
        a = y[j]
        b = dy[j]
        c = iy[j]
        p0 = p[2 * j]
        p1 = p[2 * j + 1]
        p2 = p[2 * j + 2]
        q0 = q[2 * j]
        q1 = q[2 * j + 1]
        q2 = q[2 * j + 2]
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
        # the integral's stages are the y-stages
        iy[j + 1] = c + h / 6.0 * (a + 2.0 * (a + 0.5 * h * k1y)
                                   + 2.0 * (a + 0.5 * h * k2y) + (a + h * k3y))
    return ya, dya, ia


cdef inline double _horner(const double[::1] c, double t) nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        acc = acc * t + c[k]
    return acc


def invert_bridge(double[::1] u, double[::1] zk, double[::1] tk, double[::1] cI,
                  double[::1] c0, double[::1] c1, double z0, double L, int iters):
    """Solve z0 + I(t) = u for t in [0, L] where I' = P > 0, with I tabulated as (tk, zk).

    Linear interpolation in the table gives the start, then ``iters`` clipped
    Newton steps. Returns (t, P(t), P'(t)) with P, P', I in power-basis coefficients.
    """
    cdef Py_ssize_t i, j, lo, hi, mid, m = zk.shape[0], n = u.shape[0]
    cdef double x, t, s
    t_out = np.empty(n)
    p_out = np.empty(n)
    d_out = np.empty(n)
    cdef double[::1] to = t_out, po = p_out, do = d_out
    for i in range(n):
        x = u[i]
        if x <= zk[0]:
            t = tk[0]
        elif x >= zk[m - 1]:
            t = tk[m - 1]
        else:
            lo = 0
            hi = m - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if zk[mid] <= x:
                    lo = mid
                else:
                    hi = mid
            s = (x - zk[lo]) / (zk[hi] - zk[lo])
            t = tk[lo] + s * (tk[hi] - tk[lo])
        for j in range(iters):
            t = t - (z0 + _horner(cI, t) - x) / _horner(c0, t)
            if t < 0.0:
                t = 0.0
            elif t > L:
                t = L
        to[i] = t
        po[i] = _horner(c0, t)
        do[i] = _horner(c1, t)
    return t_out, p_out, d_out
