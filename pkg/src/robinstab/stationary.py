"""Radial stationary solutions of the Robin problem by shooting.

The radial equation is ``v'' + drift(r) v' + f(v) = 0`` on ``[r_lo, r_hi]``
with ``-v'(r_lo) + alpha v(r_lo) = 0`` and ``v'(r_hi) + alpha v(r_hi) = 0``
(the outward normal at the inner end points toward decreasing r).
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .quadrature import derivative4

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class ShotDiverged(ArithmeticError):
    """The shooting trajectory left the blowup bound."""


@dataclass
class RadialSolution:
    """Grid values of a radial solution together with its problem data."""

    grid: np.ndarray
    v: np.ndarray
    v_prime: np.ndarray
    alpha: float
    domain: object
    nonlinearity: object
    c: float = np.nan
    terminal_residual: float = np.nan
    meta: dict = field(default_factory=dict)

    @property
    def surface(self):
        return self.domain

    @property
    def h(self):
        return float(self.grid[1] - self.grid[0])

    @property
    def n(self):
        return len(self.grid) - 1

    def norm(self):
        return float(np.max(np.abs(self.v)))

    def to_rows(self):
        return np.column_stack([self.grid, self.v, self.v_prime])


def _drift_samples(domain, n):
    """Drift on the half-step lattice: 2n + 1 points from r_lo to r_hi."""
    r_half = np.linspace(domain.r_lo, domain.r_hi, 2 * n + 1)
    return r_half, domain.drift(r_half)


def _shoot_batch(domain, nonlinearity, alpha, cs, n, blowup=1e8):
    """RK4 for many initial values at once.

    Returns (v, v', residual, diverged) with v, v' of shape (n + 1, len(cs)).
    """
    cs = np.atleast_1d(np.asarray(cs, dtype=float))
    h = (domain.r_hi - domain.r_lo) / n
    _, kap = _drift_samples(domain, n)
    f = nonlinearity.f
    bound = blowup * (1.0 + np.abs(cs))
    v = np.empty((n + 1, len(cs)))
    w = np.empty((n + 1, len(cs)))
    a = cs.copy()
    b = alpha * cs
    v[0], w[0] = a, b
    alive = np.ones(len(cs), dtype=bool)
    hh = 0.5 * h
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(n):
            k0, k1, k2 = kap[2 * j], kap[2 * j + 1], kap[2 * j + 2]
            k1v = b
            k1w = -k0 * b - f(a)
            av = a + hh * k1v
            k2v = b + hh * k1w
            k2w = -k1 * k2v - f(av)
            av = a + hh * k2v
            k3v = b + hh * k2w
            k3w = -k1 * k3v - f(av)
            av = a + h * k3v
            k4v = b + h * k3w
            k4w = -k2 * k4v - f(av)
            a = a + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            b = b + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            bad = ~np.isfinite(a) | ~np.isfinite(b) | (np.abs(a) > bound)
            if np.any(bad & alive):
                alive &= ~bad
                # park dead trajectories at zero so they stop generating overflow
                a = np.where(alive, a, 0.0)
                b = np.where(alive, b, 0.0)
            v[j + 1], w[j + 1] = a, b
    res = w[-1] + alpha * v[-1]
    res = np.where(alive, res, np.nan)
    v[:, ~alive] = np.nan
    w[:, ~alive] = np.nan
    return v, w, res, ~alive


def shoot(domain, nonlinearity, alpha, c, n, blowup=1e8):
    """Integrate v(r_lo) = c, v'(r_lo) = alpha c with RK4 and return (path, terminal residual).

    The terminal residual is ``v'(r_hi) + alpha v(r_hi)``. Raises ShotDiverged
    when |v| exceeds ``blowup * (1 + |c|)``.
    """
    if n < 16:
        raise ValueError("shooting needs n >= 16")
    v, w, res, dead = _shoot_batch(domain, nonlinearity, alpha, [c], n, blowup)
    if dead[0]:
        raise ShotDiverged(f"shot diverged for c = {c}")
    grid = domain.grid(n)
    sol = RadialSolution(grid, v[:, 0], w[:, 0], float(alpha), domain, nonlinearity,
                         c=float(c), terminal_residual=float(res[0]))
    return sol, float(res[0])


def _illinois(domain, nonlinearity, alpha, lo, hi, flo, fhi, n, blowup, tol, max_iter=200):
    """Batched regula falsi (Illinois variant) on sign-change brackets."""
    a, b = lo.copy(), hi.copy()
    fa, fb = flo.copy(), fhi.copy()
    done = np.abs(fb) < tol
    for _ in range(max_iter):
        if np.all(done):
            break
        with np.errstate(invalid="ignore", divide="ignore"):
            c = b - fb * (b - a) / (fb - fa)
        mid = 0.5 * (a + b)
        lo_, hi_ = np.minimum(a, b), np.maximum(a, b)
        c = np.where(np.isfinite(c) & (c > lo_) & (c < hi_), c, mid)
        idx = np.flatnonzero(~done)
        _, _, fc, dead = _shoot_batch(domain, nonlinearity, alpha, c[idx], n, blowup)
        for j, i in enumerate(idx):
            if dead[j]:
                # retreat to the midpoint; if that diverges too the bracket is dropped later
                b[i], fb[i] = mid[i], np.nan
                done[i] = True
                continue
            if fc[j] * fb[i] < 0:
                a[i], fa[i] = b[i], fb[i]
            else:
                fa[i] *= 0.5
            b[i], fb[i] = c[i], fc[j]
            width = abs(b[i] - a[i])
            if abs(fc[j]) < tol or width <= 4 * EPS * (1.0 + abs(b[i])):
                done[i] = True
    return b, fb


@dataclass
class ScanInfo:
    n_diverged: int = 0
    n_brackets: int = 0
    n_rejected: int = 0
    plateau: bool = False


def solve_stationary(domain, nonlinearity, alpha, c_range, n_scan=41, n=1024,
                     blowup=1e8, tol=1e-10, plateau_tol=1e-6, return_info=False):
    """Find radial solutions by scanning the initial value and refining sign changes.

    Every returned solution passes :func:`validate`. When f is linear and the
    shot residual vanishes identically (f' equals a Robin eigenvalue) the
    one-parameter family is reported by a single representative with max|v| = 1.
    """
    c_lo, c_hi = map(float, c_range)
    if not (np.isfinite(c_lo) and np.isfinite(c_hi)) or n_scan < 2:
        raise ValueError("c_range must be finite and n_scan >= 2")
    info = ScanInfo()
    grid = domain.grid(n)
    cs = np.linspace(c_lo, c_hi, n_scan)
    f0 = float(nonlinearity.f(0.0))
    found = []

    if nonlinearity.is_linear:
        v, w, res, dead = _shoot_batch(domain, nonlinearity, alpha, [1.0], n, blowup)
        scale = np.max(np.abs(w[:, 0])) + abs(alpha) * np.max(np.abs(v[:, 0])) + 1.0
        if not dead[0] and abs(res[0]) < plateau_tol * scale:
            info.plateau = True
            vmax = np.max(np.abs(v[:, 0]))
            rep = RadialSolution(grid, v[:, 0] / vmax, w[:, 0] / vmax, float(alpha), domain,
                                 nonlinearity, c=1.0 / vmax, terminal_residual=float(res[0] / vmax),
                                 meta={"plateau": True})
            zero = RadialSolution(grid, np.zeros(n + 1), np.zeros(n + 1), float(alpha), domain,
                                  nonlinearity, c=0.0, terminal_residual=0.0)
            out = [zero, rep] if c_lo <= 0 <= c_hi else [rep]
            return (out, info) if return_info else out

    v, w, res, dead = _shoot_batch(domain, nonlinearity, alpha, cs, n, blowup)
    info.n_diverged = int(np.sum(dead))
    if info.n_diverged:
        log.warning("%d of %d shots diverged during the scan", info.n_diverged, n_scan)

    exact = [i for i in range(n_scan) if not dead[i] and res[i] == 0.0]
    for i in exact:
        found.append((cs[i], v[:, i], w[:, i], 0.0))
    if f0 == 0.0 and c_lo <= 0.0 <= c_hi and not any(c == 0.0 for c, *_ in found):
        found.append((0.0, np.zeros(n + 1), np.zeros(n + 1), 0.0))

    pairs = [i for i in range(n_scan - 1)
             if not dead[i] and not dead[i + 1] and res[i] * res[i + 1] < 0]
    info.n_brackets = len(pairs)
    if pairs:
        lo = cs[pairs]
        hi = cs[[i + 1 for i in pairs]]
        roots, fr = _illinois(domain, nonlinearity, alpha, lo, hi, res[pairs],
                              res[[i + 1 for i in pairs]], n, blowup, tol)
        ok = np.isfinite(fr)
        if np.any(ok):
            vv, ww, rr, dd = _shoot_batch(domain, nonlinearity, alpha, roots[ok], n, blowup)
            for j, c in enumerate(roots[ok]):
                if not dd[j]:
                    found.append((c, vv[:, j], ww[:, j], rr[j]))

    found.sort(key=lambda t: t[0])
    sols = []
    for c, vv, ww, rr in found:
        s = RadialSolution(grid, np.array(vv), np.array(ww), float(alpha), domain, nonlinearity,
                           c=float(c), terminal_residual=float(rr))
        if not validate(s).valid:
            info.n_rejected += 1
            continue
        if any(np.max(np.abs(s.v - t.v)) < 1e-6 * (1.0 + np.max(np.abs(s.v))) for t in sols):
            continue
        sols.append(s)
    return (sols, info) if return_info else sols


@dataclass
class ValidationReport:
    ode_residual: float      # max |centered 2nd-order residual| over interior nodes
    ode_residual4: float     # 4th-order residual used for the validity decision
    robin_inner: float
    robin_outer: float
    tol: float
    valid: bool


def validate(solution, tol=None):
    """ODE and Robin residuals of a tabulated solution.

    ``ode_residual`` uses plain centered differences of v (second order, so it
    drops by ~4 per grid halving). Validity is decided on a fourth-order
    residual built from the stored derivative, against
    ``max(1e-8, 100 h^4 scale)`` plus a round-off floor.
    """
    r, v, w = solution.grid, solution.v, solution.v_prime
    h = solution.h
    alpha = solution.alpha
    dom = solution.domain
    kap = dom.drift(r)
    fv = solution.nonlinearity.f(v)
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
        return ValidationReport(np.inf, np.inf, np.inf, np.inf, 0.0, False)
    d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
    d1 = (v[2:] - v[:-2]) / (2 * h)
    ode2 = float(np.max(np.abs(d2 + kap[1:-1] * d1 + fv[1:-1]))) if len(v) > 2 else 0.0
    if len(v) >= 5:
        res4 = derivative4(w, h) + kap * w + fv
        ode4 = float(np.max(np.abs(res4)))
    else:
        ode4 = ode2
    rin = float(abs(-w[0] + alpha * v[0]))
    rout = float(abs(w[-1] + alpha * v[-1]))
    scale = float(np.max(np.abs(kap * w) + np.abs(fv)) + np.max(np.abs(v)))
    if tol is None:
        floor = 1e3 * EPS * (np.max(np.abs(w)) / h + scale)
        tol = max(1e-8, 100.0 * h**4 * scale) + floor
    valid = ode4 <= tol and rin <= tol and rout <= tol
    return ValidationReport(ode2, ode4, rin, rout, float(tol), bool(valid))
