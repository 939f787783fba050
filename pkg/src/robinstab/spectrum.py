"""Principal eigenvalue of the linearised Robin problem.

For a radial base state v and Fourier mode k the eigenproblem is

    (W g')'/W + (f'(v) - angular_k) g + lam g = 0,
    g'(r_lo) = alpha g(r_lo),  g'(r_hi) = -alpha g(r_hi),

with W the radial weight. It is discretised by vertex-centred finite volumes:
W at cell midpoints in the flux, trapezoid (lumped) mass, and the Robin terms
``alpha W`` added to the two end rows. The pencil (A, M) is symmetric
tridiagonal with diagonal M, so ``M^{-1/2} A M^{-1/2}`` is solved by
Sturm-count bisection followed by inverse iteration.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _kernels
from .quadrature import derivative4, integrate_samples

EPS = np.finfo(float).eps


class EigenError(ArithmeticError):
    """Bisection or inverse iteration did not converge."""


class InternalConsistencyError(AssertionError):
    """A property that must hold by construction was violated (e.g. monotonicity in k)."""


@dataclass
class SturmLiouvilleProblem:
    """Discrete pencil data on a uniform grid.

    ``p_mid`` is the weight at cell midpoints, ``w`` the weight at nodes and
    ``q`` the nodal potential ``w (f'(v) - angular_k)``.
    """

    r: np.ndarray
    p_mid: np.ndarray
    w: np.ndarray
    q: np.ndarray
    alpha: float
    mode_k: int
    h: float

    @property
    def n(self):
        return len(self.r) - 1

    def lumped(self):
        c = np.full(len(self.r), self.h)
        c[0] = c[-1] = 0.5 * self.h
        return c

    def matrices(self):
        """(diag, off, mass) of the stiffness matrix A and the diagonal mass M."""
        h = self.h
        c = self.lumped()
        flux = self.p_mid / h
        diag = np.zeros(len(self.r))
        diag[:-1] += flux
        diag[1:] += flux
        diag -= c * self.q
        diag[0] += self.alpha * self.w[0]
        diag[-1] += self.alpha * self.w[-1]
        off = -flux
        mass = c * self.w
        return diag, off, mass

    def standard_form(self):
        diag, off, mass = self.matrices()
        s = np.sqrt(mass)
        return diag / mass, off / (s[:-1] * s[1:]), s

    def quadratic_form(self, g):
        """Numerator and denominator of the discrete Rayleigh quotient (difference form)."""
        g = np.asarray(g, dtype=float)
        num = np.sum(self.p_mid * np.diff(g) ** 2) / self.h
        num -= np.sum(self.lumped() * self.q * g * g)
        num += self.alpha * (self.w[0] * g[0] ** 2 + self.w[-1] * g[-1] ** 2)
        den = np.sum(self.lumped() * self.w * g * g)
        return num, den


@dataclass
class EigenResult:
    lambda1: float
    eigenfunction: np.ndarray
    mode_k: int
    n: int
    grid: np.ndarray
    extrapolated: float = None
    residual: float = 0.0
    per_mode: dict = field(default_factory=dict)

    @property
    def value(self):
        """The reported eigenvalue: extrapolated when available."""
        return self.lambda1 if self.extrapolated is None else self.extrapolated

    def to_rows(self):
        return np.column_stack([self.grid, self.eigenfunction])


def _base_state(solution, r):
    """Base state values on grid r (Hermite interpolation when grids differ)."""
    if len(solution.grid) == len(r) and np.allclose(solution.grid, r, rtol=0, atol=1e-14):
        return solution.v
    spline = CubicHermiteSpline(solution.grid, solution.v, solution.v_prime)
    return spline(r)


def discretize(domain, solution=None, mode_k=0, n=None, alpha=None, fprime=None):
    """Assemble the pencil for the linearisation about ``solution`` (or f' = 0 if None).

    ``fprime`` may be given directly as nodal values (on the n-grid) instead.
    """
    if n is None:
        n = solution.n if solution is not None else 2048
    if n < 32:
        raise ValueError("eigen discretisation needs n >= 32")
    if alpha is None:
        if solution is None:
            raise ValueError("alpha is required without a solution")
        alpha = solution.alpha
    r = domain.grid(n)
    h = (domain.r_hi - domain.r_lo) / n
    w = domain.weight(r)
    p_mid = domain.weight(0.5 * (r[:-1] + r[1:]))
    if fprime is None:
        fprime = np.zeros(n + 1) if solution is None else \
            solution.nonlinearity.f_prime(_base_state(solution, r))
    fprime = np.broadcast_to(np.asarray(fprime, dtype=float), r.shape)
    ang = domain.angular(r, mode_k) if mode_k else 0.0
    q = w * (fprime - ang)
    if not (np.all(p_mid > 0) and np.all(w > 0) and np.all(np.isfinite(q))):
        raise ValueError("weights must be positive and the potential finite")
    return SturmLiouvilleProblem(r, p_mid, w, q, float(alpha), int(mode_k), float(h))


def smallest_eigenvalue(problem, max_iter=400, inverse_steps=3):
    """Smallest eigenvalue of the pencil with its eigenvector.

    Bisection on Sturm counts locates the eigenvalue to a few ulps of the
    matrix norm; inverse iteration gives the vector, and the reported value is
    the difference-form Rayleigh quotient of that vector, which is accurate
    to rounding relative to lam itself rather than to the matrix norm.
    """
    d, e, s = problem.standard_form()
    e2 = e * e
    rad = np.zeros_like(d)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    pad = 1e-12 * (1.0 + max(abs(lo), abs(hi)))
    lo, hi = lo - pad, hi + pad
    tol = 8 * EPS * max(abs(lo), abs(hi), 1.0)
    lo, hi, it = _kernels.bisect_smallest(np.ascontiguousarray(d), np.ascontiguousarray(e2),
                                          lo, hi, tol, max_iter)
    if hi - lo > 16 * tol:
        raise EigenError(f"bisection did not converge: bracket [{lo}, {hi}] after {it} steps")
    sigma = 0.5 * (lo + hi)
    y = np.ones(len(d)) + 1e-3 * np.linspace(0.0, 1.0, len(d))
    e = np.ascontiguousarray(e)
    for _ in range(inverse_steps):
        y = _kernels.tridiag_solve(e, np.ascontiguousarray(d - sigma), e, y)
        nrm = np.max(np.abs(y))
        if not np.isfinite(nrm) or nrm == 0:
            raise EigenError("inverse iteration broke down")
        y = y / nrm
    g = y / s
    num, den = problem.quadratic_form(g)
    g = g / np.sqrt(den)
    lam = num / den
    if problem.mode_k == 0 and np.sum(g) < 0:
        g = -g
    elif problem.mode_k != 0 and g[0] < 0:
        g = -g
    diag, off, mass = problem.matrices()
    Ag = diag * g
    Ag[:-1] += off * g[1:]
    Ag[1:] += off * g[:-1]
    anorm = np.max(np.abs(diag)) + 2 * np.max(np.abs(off))
    res = float(np.max(np.abs(Ag - lam * mass * g)) / (anorm * np.max(np.abs(g)) * np.max(mass)
                                                          / np.min(mass)))
    return EigenResult(float(lam), g, problem.mode_k, problem.n, problem.r, residual=res)


def richardson(coarse, fine, order=2):
    return (2**order * fine - coarse) / (2**order - 1)


def eigen_mode(domain, solution=None, mode_k=0, n=2048, alpha=None, extrapolate=True, fprime=None):
    """lambda_1 for one Fourier mode, optionally Richardson-extrapolated from n and 2n."""
    res = smallest_eigenvalue(discretize(domain, solution, mode_k, n, alpha, fprime))
    if extrapolate and fprime is None:
        fine = smallest_eigenvalue(discretize(domain, solution, mode_k, 2 * n, alpha))
        res.extrapolated = float(richardson(res.lambda1, fine.lambda1))
    return res


def lambda1_full(domain, solution, k_max=4, n=2048, extrapolate=True, alpha=None):
    """Minimum over Fourier modes k = 0..k_max; checks monotonicity in k."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    results = [eigen_mode(domain, solution, k, n, alpha, extrapolate) for k in range(k_max + 1)]
    vals = [r.value for r in results]
    for k in range(k_max):
        slack = 1e-9 * (1.0 + abs(vals[k]))
        if vals[k + 1] < vals[k] - slack:
            raise InternalConsistencyError(
                f"lambda_1 decreased from mode {k} ({vals[k]}) to mode {k + 1} ({vals[k + 1]})")
    best = results[int(np.argmin(vals))]
    best.per_mode = {k: v for k, v in enumerate(vals)}
    return best


def linear_lambda(domain, alpha, n=2048, extrapolate=True):
    """Lambda_1 of the linear Robin problem (f' = 0, k = 0)."""
    return eigen_mode(domain, None, 0, n, alpha, extrapolate).value


def rayleigh_quotient(domain, test_fn, solution=None, alpha=None, grid=None):
    """Discrete Rayleigh quotient of a radial grid function.

    Uses the same trapezoid quadratic form as the eigen-discretisation, so the
    quotient of the computed eigenfunction reproduces its eigenvalue.
    """
    g = np.asarray(test_fn, dtype=float)
    if solution is not None:
        n = solution.n
    else:
        n = len(g) - 1 if grid is None else len(grid) - 1
    prob = discretize(domain, solution, 0, n, alpha)
    num, den = prob.quadratic_form(g)
    if den <= 0:
        raise ZeroDivisionError("test function vanishes identically")
    return float(num / den)


def energy(domain, u, nonlinearity, alpha, grid=None, u_prime=None):
    """E(u) = int |u'|^2 dmu + alpha (sum over ends of L u^2) - 2 int F(u) dmu."""
    if hasattr(u, "v_prime"):
        grid, u_prime, u = u.grid, u.v_prime, u.v
    r = np.asarray(grid, dtype=float)
    u = np.asarray(u, dtype=float)
    if u_prime is None:
        u_prime = derivative4(u, r[1] - r[0])
    dens = domain.density(r)
    bulk = integrate_samples((u_prime**2 - 2.0 * nonlinearity.F(u)) * dens, r)
    bd = domain.boundary()
    return float(bulk + alpha * (bd.L_inner * u[0] ** 2 + bd.L_outer * u[-1] ** 2))


def boundary_bochner_term(domain, solution):
    """Boundary sum sum_ends L [alpha^3 u^2 + alpha u f(u) + alpha^2 (m-1) H u^2]."""
    bd = domain.boundary()
    a = solution.alpha
    f = solution.nonlinearity.f
    total = 0.0
    for L, tr, u in ((bd.L_inner, bd.trace_inner, solution.v[0]),
                     (bd.L_outer, bd.trace_outer, solution.v[-1])):
        total += L * (a**3 * u * u + a * u * float(f(u)) + a * a * tr * u * u)
    return float(total)


def gradient_bound(domain, solution, lambda1):
    """Both sides of lam_1 int |u'|^2 <= boundary term - int Ric u'^2 for a radial solution.

    Returns (lhs, rhs, scale) so that the slack is ``rhs - lhs``.
    """
    r = solution.grid
    dens = domain.density(r)
    up2 = solution.v_prime**2
    grad = integrate_samples(up2 * dens, r)
    ric = integrate_samples(domain.ricci(r) * up2 * dens, r)
    bterm = boundary_bochner_term(domain, solution)
    lhs = lambda1 * grad
    rhs = bterm - ric
    scale = 1.0 + abs(lhs) + abs(bterm) + abs(ric)
    return float(lhs), float(rhs), float(scale)
