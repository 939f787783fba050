"""Explicit time stepping of u_t = Lap u + f(u) with Robin boundary conditions.

The spatial operator is the same vertex-centred finite-volume discretisation
used by the eigen-solver, so the linearisation of the semi-discrete flow about
a discrete equilibrium is exactly the discrete eigenproblem.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _kernels, spectrum


class EvolutionError(ValueError):
    """Invalid time-stepping setup (e.g. the step violates the explicit stability limit)."""


class Trend(str, Enum):
    DECAY = "Decay"
    GROWTH = "Growth"
    NEUTRAL = "Neutral"


@dataclass
class EvolutionRun:
    t: np.ndarray
    norms: np.ndarray
    u_final: np.ndarray
    dt: float
    T: float
    n: int
    steps: int
    blowup: bool = False
    t_stop: float = None
    grid: np.ndarray = None
    meta: dict = field(default_factory=dict)
    measured_rate: float = None

    def to_rows(self):
        return np.column_stack([self.t, self.norms])


class RadialOperator:
    """Finite-volume Robin Laplacian on the radial grid: (A u)_i = (flux balance - Robin)/mass."""

    def __init__(self, domain, alpha, n):
        self.domain = domain
        self.alpha = float(alpha)
        self.n = int(n)
        self.r = domain.grid(n)
        self.h = domain.length / n
        self.W = domain.weight(self.r)
        self.p_mid = domain.weight(0.5 * (self.r[:-1] + self.r[1:]))
        lump = np.full(n + 1, self.h)
        lump[0] = lump[-1] = 0.5 * self.h
        self.lump = lump
        self.mass = lump * self.W
        self.quad = domain.measure_factor * self.mass

    def apply(self, u):
        """Laplacian of u along axis 0 (works column-wise for 2D arrays)."""
        flux = (self.p_mid / self.h).reshape(-1, *([1] * (u.ndim - 1))) * np.diff(u, axis=0)
        out = np.zeros_like(u)
        out[:-1] += flux
        out[1:] -= flux
        out[0] -= self.alpha * self.W[0] * u[0]
        out[-1] -= self.alpha * self.W[-1] * u[-1]
        return out / self.mass.reshape(-1, *([1] * (u.ndim - 1)))

    def tridiagonal(self):
        """(sub, diag, sup) of the mass-weighted operator M A (symmetric)."""
        flux = self.p_mid / self.h
        diag = np.zeros(self.n + 1)
        diag[:-1] -= flux
        diag[1:] -= flux
        diag[0] -= self.alpha * self.W[0]
        diag[-1] -= self.alpha * self.W[-1]
        return flux.copy(), diag, flux.copy()

    def norm(self, e):
        return float(np.sqrt(np.sum(self.quad * e * e)))

    def cfl_limit(self, safety=0.4):
        return safety * self.h**2 / 2.0


def discrete_equilibrium(domain, nonlinearity, alpha, u_guess, n, tol=1e-13, max_iter=60):
    """Newton solve of the semi-discrete steady state A u + f(u) = 0 starting from u_guess."""
    op = RadialOperator(domain, alpha, n)
    u = np.array(u_guess, dtype=float)
    sub, diag0, sup = op.tridiagonal()
    for _ in range(max_iter):
        G = op.mass * (op.apply(u) + nonlinearity.f(u))
        scale = np.max(np.abs(op.mass * nonlinearity.f(u))) + np.max(np.abs(op.mass * op.apply(u))) + 1e-300
        if np.max(np.abs(G)) <= tol * scale:
            return u
        diag = diag0 + op.mass * nonlinearity.f_prime(u)
        du = _kernels.tridiag_solve(np.ascontiguousarray(sub), np.ascontiguousarray(diag),
                                    np.ascontiguousarray(sup), np.ascontiguousarray(-G))
        u = u + du
        if np.max(np.abs(du)) <= 1e-15 * (1.0 + np.max(np.abs(u))):
            return u
    raise EvolutionError("Newton iteration for the discrete equilibrium did not converge")


def resample(solution, n):
    """Hermite interpolation of a RadialSolution onto the n-grid of its domain."""
    r = solution.domain.grid(n)
    if len(r) == len(solution.grid):
        return solution.v.copy()
    return CubicHermiteSpline(solution.grid, solution.v, solution.v_prime)(r)


def principal_mode(domain, nonlinearity, alpha, u_star, n, mode_k=0):
    """Discrete lambda_1 and eigenfunction (max-normalised) of the linearisation at u_star."""
    fp = nonlinearity.f_prime(u_star)
    res = spectrum.smallest_eigenvalue(spectrum.discretize(domain, None, mode_k, n, alpha, fprime=fp))
    phi = res.eigenfunction / np.max(np.abs(res.eigenfunction))
    return res.lambda1, phi


def _sample_plan(steps, n_samples):
    n_samples = max(2, min(n_samples, steps + 1))
    return np.unique(np.round(np.linspace(0, steps, n_samples)).astype(int))


def evolve_radial(domain, nonlinearity, alpha, u0, T, n, dt=None, method="euler",
                  reference=None, n_samples=200, blowup=1e8, safety=0.4):
    """Method of lines in r with explicit Euler (or RK4) in time.

    Records ||u(t) - u*|| in L^2(dmu) at sample times when ``reference`` is
    given (else ||u(t)||).
    """
    op = RadialOperator(domain, alpha, n)
    limit = op.cfl_limit(safety)
    if dt is None:
        dt = limit
    if dt <= 0 or dt > limit * (1 + 1e-12):
        raise EvolutionError(f"dt = {dt} violates the explicit limit {limit}")
    steps = max(1, int(np.ceil(T / dt - 1e-9)))
    dt = T / steps
    u = np.array(u0, dtype=float)
    if u.shape != (n + 1,):
        raise EvolutionError(f"initial condition must have {n + 1} values")
    ref = np.zeros(n + 1) if reference is None else np.asarray(reference, dtype=float)
    f = nonlinearity.f
    rhs = lambda x: op.apply(x) + f(x)
    plan = _sample_plan(steps, n_samples)
    ts, norms = [], []
    k = 0
    stopped = False
    for s in range(steps + 1):
        if k < len(plan) and s == plan[k]:
            ts.append(s * dt)
            norms.append(op.norm(u - ref))
            k += 1
        if s == steps:
            break
        if method == "euler":
            u = u + dt * rhs(u)
        elif method == "rk4":
            k1 = rhs(u)
            k2 = rhs(u + 0.5 * dt * k1)
            k3 = rhs(u + 0.5 * dt * k2)
            k4 = rhs(u + dt * k3)
            u = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            raise EvolutionError(f"unknown method {method!r}")
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > blowup:
            stopped = True
            ts.append((s + 1) * dt)
            norms.append(np.inf)
            break
    return EvolutionRun(np.array(ts), np.array(norms), u, dt, T, n, steps, blowup=stopped,
                        t_stop=ts[-1] if stopped else None, grid=op.r,
                        meta={"method": method, "alpha": float(alpha)})


def evolve_2d(domain, nonlinearity, alpha, u0, T, n_r, n_theta, dt=None, reference=None,
              n_samples=200, blowup=1e8, safety=0.4):
    """Explicit Euler on the (r, theta) tensor grid of a surface of revolution.

    ``u0`` has shape (n_r + 1, n_theta) and is periodic in theta.
    """
    if domain.dim != 2:
        raise EvolutionError("2D evolution is defined for surfaces (dimension 2)")
    op = RadialOperator(domain, alpha, n_r)
    hth = 2 * np.pi / n_theta
    inv_psi2 = (1.0 / op.W**2)[:, None]
    limit = safety / (2.0 * (1.0 / op.h**2 + float(np.max(inv_psi2)) / hth**2))
    if dt is None:
        dt = limit
    if dt <= 0 or dt > limit * (1 + 1e-12):
        raise EvolutionError(f"dt = {dt} violates the explicit limit {limit}")
    steps = max(1, int(np.ceil(T / dt - 1e-9)))
    dt = T / steps
    u = np.array(u0, dtype=float)
    if u.shape != (n_r + 1, n_theta):
        raise EvolutionError("initial condition must have shape (n_r + 1, n_theta)")
    if reference is None:
        ref = np.zeros_like(u)
    else:
        ref = np.asarray(reference, dtype=float)
        if ref.ndim == 1:
            ref = np.repeat(ref[:, None], n_theta, axis=1)
    w2 = (op.mass[:, None] * hth)
    norm = lambda e: float(np.sqrt(np.sum(w2 * e * e)))
    f = nonlinearity.f
    plan = _sample_plan(steps, n_samples)
    ts, norms = [], []
    k = 0
    stopped = False
    for s in range(steps + 1):
        if k < len(plan) and s == plan[k]:
            ts.append(s * dt)
            norms.append(norm(u - ref))
            k += 1
        if s == steps:
            break
        ang = (np.roll(u, -1, axis=1) - 2.0 * u + np.roll(u, 1, axis=1)) / hth**2 * inv_psi2
        u = u + dt * (op.apply(u) + ang + f(u))
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > blowup:
            stopped = True
            ts.append((s + 1) * dt)
            norms.append(np.inf)
            break
    return EvolutionRun(np.array(ts), np.array(norms), u, dt, T, n_r, steps, blowup=stopped,
                        t_stop=ts[-1] if stopped else None, grid=op.r,
                        meta={"n_theta": n_theta, "alpha": float(alpha)})


@dataclass
class TrendResult:
    trend: Trend
    rate: float
    n_fit: int


def fit_rate(t, norms, skip=0.2):
    t = np.asarray(t, dtype=float)
    y = np.asarray(norms, dtype=float)
    ok = np.isfinite(y)
    t, y = t[ok], y[ok]
    start = int(np.floor(skip * len(t)))
    t, y = t[start:], y[start:]
    if len(t) < 10:
        raise EvolutionError("need at least 10 samples after the transient skip")
    if np.any(y <= 0):
        return -np.inf, len(t)
    slope = np.polyfit(t, np.log(y), 1)[0]
    return float(slope), len(t)


def classify(run, tol_rate=1e-3, skip=0.2):
    """Decay / Growth / Neutral from a least-squares fit of log-norm on the tail."""
    t, y = (run.t, run.norms) if isinstance(run, EvolutionRun) else run
    rate, nfit = fit_rate(t, y, skip)
    if isinstance(run, EvolutionRun):
        run.measured_rate = rate
    if rate < -tol_rate:
        trend = Trend.DECAY
    elif rate > tol_rate:
        trend = Trend.GROWTH
    else:
        trend = Trend.NEUTRAL
    return TrendResult(trend, rate, nfit)
