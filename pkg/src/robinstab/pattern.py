"""Synthesis of a stable radial pattern that still satisfies the boundary instability sign.

On a domain whose convexity indicator (W'/W)' is positive somewhere, we build
a reaction term f and a negative Robin coefficient alpha for which the
increasing profile Z is a stationary solution with

* the boundary sum of the radial instability criterion strictly negative, and
* lambda_1 > 0, certified both by a positive supersolution w and by the
  eigen-solver.

Construction outline (all on one uniform grid):

1. z solves z'' + k z' + (k' - B) z = 0 (k = W'/W) from the left end with
   z = 0, z' = 1, and backward from the right end with z = beta, z' = -1;
2. a quintic Hermite polynomial joins the two pieces with C^2 contact inside
   the convexity window;
3. Z = int z, alpha = -beta / Z(r_hi), and f is read off from
   f(Z(r)) = -(W z)'/W (r): linear outside the bridge, tabulated across it;
4. w = z corrected by odd powers (r - R1)^{3l}, (r - R2)^{3l} near the two
   ends gives the supersolution.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from . import _kernels, criteria, spectrum, stationary
from .nonlinearity import Nonlinearity

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class ConstructionError(RuntimeError):
    """The construction could not be completed; the message names the failing condition."""


class NoConvexityWindow(ConstructionError):
    pass


@dataclass
class PatternParams:
    R0: float
    R1: float
    R2: float
    R3: float
    beta: float
    B: float
    m1: float
    m2: float
    l: int
    n: int
    Bbar: float = 0.0
    C: float = 0.0
    B_low_inner: float = 0.0
    B_low_outer: float = 0.0
    B_bound_first: float = 0.0
    B_bound_second: float = 0.0

    def as_dict(self):
        return asdict(self)


# -- window -----------------------------------------------------------------------------

def locate_window(domain, n_scan=4001, margin=0.02):
    """Maximiser of the convexity indicator and a symmetric half-max window around it.

    Returns (R_hat, (R0, R1, R2, R3)) with R1, R2 at the inner thirds.
    """
    r = np.linspace(domain.r_lo, domain.r_hi, n_scan)
    ind = domain.drift_prime(r)
    j = int(np.argmax(ind))
    top = float(ind[j])
    if top <= 1e-10:
        raise NoConvexityWindow("no convexity window: (W'/W)' <= 0 everywhere")
    a_, b_ = r[max(j - 1, 0)], r[min(j + 1, n_scan - 1)]
    opt = minimize_scalar(lambda x: -float(domain.drift_prime(x)), bounds=(a_, b_),
                          method="bounded", options={"xatol": 1e-12})
    if -opt.fun >= top:
        top = float(-opt.fun)
    half = 0.5 * top
    lo = j
    while lo > 0 and ind[lo - 1] > half:
        lo -= 1
    hi = j
    while hi < n_scan - 1 and ind[hi + 1] > half:
        hi += 1
    R_hat = float(opt.x) if -opt.fun >= ind[j] else float(r[j])
    edge = margin * domain.length
    d = min(R_hat - r[lo], r[hi] - R_hat, R_hat - domain.r_lo - edge, domain.r_hi - edge - R_hat)
    if d <= 0:
        raise NoConvexityWindow("convexity window touches the boundary")
    R0, R3 = R_hat - d, R_hat + d
    R1 = R0 + (R3 - R0) / 3.0
    R2 = R0 + 2.0 * (R3 - R0) / 3.0
    return R_hat, (R0, R1, R2, R3)


# -- pieces ----------------------------------------------------------------------------

def _half_lattice(domain, n):
    rh = np.linspace(domain.r_lo, domain.r_hi, 2 * n + 1)
    return rh, domain.drift(rh), domain.drift_prime(rh)


def solve_z1(domain, B, R1, n, lattice=None):
    """Forward solve from the left end with z = 0, z' = 1 up to the node nearest R1.

    Returns (r, z, z', int z).
    """
    h = domain.length / n
    i1 = int(round((R1 - domain.r_lo) / h))
    rh, kap, dkap = lattice or _half_lattice(domain, n)
    p = np.ascontiguousarray(kap[: 2 * i1 + 1])
    q = np.ascontiguousarray(dkap[: 2 * i1 + 1] - B)
    z, zp, Z = _kernels.rk4_linear(p, q, h, 0.0, 1.0)
    r = domain.r_lo + h * np.arange(i1 + 1)
    if not np.all(np.isfinite(z)):
        raise ConstructionError("z1 overflowed: B too large for this interval")
    if np.any(z[1:] <= 0) or np.any(zp <= 0):
        raise ConstructionError("B too small: z1 must be positive and increasing on (r_lo, R1]")
    return r, z, zp, Z


def solve_z2(domain, B, beta, R2, n, lattice=None):
    """Backward solve from the right end with z = beta, z' = -1 down to the node nearest R2.

    Returns (r, z, z', int_{r_hi}^r z) in increasing r.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    h = domain.length / n
    i2 = int(round((R2 - domain.r_lo) / h))
    rh, kap, dkap = lattice or _half_lattice(domain, n)
    p = np.ascontiguousarray(kap[2 * i2:][::-1])
    q = np.ascontiguousarray(dkap[2 * i2:][::-1] - B)
    z, zp, Y = _kernels.rk4_linear(p, q, -h, beta, -1.0)
    r = domain.r_lo + h * np.arange(i2, n + 1)
    z, zp, Y = z[::-1], zp[::-1], Y[::-1]
    if not np.all(np.isfinite(z)):
        raise ConstructionError("z2 overflowed: B too large for this interval")
    if np.any(z[1:-1] <= beta) or np.any(zp[:-1] >= 0):
        raise ConstructionError("B too small: z2 must exceed beta and decrease on (R2, r_hi)")
    return r, z, zp, Y


def quintic_bridge(state0, state1, length):
    """Polynomial in t = r - R1 matching (value, first, second derivative) at t = 0 and t = length."""
    L = float(length)
    A = np.array([
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [1, L, L**2, L**3, L**4, L**5],
        [0, 1, 2 * L, 3 * L**2, 4 * L**3, 5 * L**4],
        [0, 0, 2, 6 * L, 12 * L**2, 20 * L**3],
    ], dtype=float)
    coef = np.linalg.solve(A, np.r_[state0, state1])
    return Polynomial(coef)


def bridge(state0, state1, t_grid):
    """Quintic C^2 join sampled on t_grid; positivity is required."""
    P = quintic_bridge(state0, state1, t_grid[-1])
    vals = P(np.linspace(0.0, t_grid[-1], 4 * len(t_grid)))
    if np.any(vals <= 0):
        raise ConstructionError("bridge is not positive: shrink [R1, R2] or adjust B")
    return P


# -- assembled construction ------------------------------------------------------------

@dataclass
class PatternResult:
    domain: object
    r: np.ndarray
    z: np.ndarray
    z_prime: np.ndarray
    z_second: np.ndarray
    Z: np.ndarray
    alpha: float
    f: Nonlinearity
    params: PatternParams
    i1: int
    i2: int
    bridge_poly: Polynomial
    w: np.ndarray = None
    w_prime: np.ndarray = None
    w_second: np.ndarray = None
    gluing: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)

    def solution(self):
        return stationary.RadialSolution(self.r, self.Z, self.z, self.alpha, self.domain, self.f,
                                         c=0.0, terminal_residual=float(self.z[-1] + self.alpha * self.Z[-1]),
                                         meta={"pattern": True})

    def f_table(self, n=1024, margin=0.2):
        lo, hi = float(np.min(self.Z)), float(np.max(self.Z))
        span = hi - lo
        u = np.linspace(lo - margin * span, hi + margin * span, n)
        return np.column_stack([u, self.f.f(u), self.f.f_prime(u)])


def _assemble(domain, B, beta, R1, R2, n):
    h = domain.length / n
    lattice = _half_lattice(domain, n)
    r1, z1, zp1, Z1 = solve_z1(domain, B, R1, n, lattice)
    r2, z2, zp2, Y2 = solve_z2(domain, B, beta, R2, n, lattice)
    i1, i2 = len(r1) - 1, n - (len(r2) - 1)
    if i2 - i1 < 4:
        raise ConstructionError("bridge interval too short for the grid")
    r = domain.grid(n)
    kap = domain.drift(r)
    dkap = domain.drift_prime(r)

    def zpp(z, zp, idx):
        return -kap[idx] * zp - (dkap[idx] - B) * z

    s0 = [z1[-1], zp1[-1], zpp(z1[-1], zp1[-1], i1)]
    s1 = [z2[0], zp2[0], zpp(z2[0], zp2[0], i2)]
    t = r[i1:i2 + 1] - r[i1]
    P = bridge(s0, s1, t)
    dP, d2P, IP = P.deriv(), P.deriv(2), P.integ()
    z = np.concatenate([z1[:-1], P(t), z2[1:]])
    zp = np.concatenate([zp1[:-1], dP(t), zp2[1:]])
    zs = np.concatenate([zpp(z1[:-1], zp1[:-1], np.arange(i1)), d2P(t),
                         zpp(z2[1:], zp2[1:], np.arange(i2 + 1, n + 1))])
    ZR1 = Z1[-1]
    Zb = ZR1 + IP(t)
    ZR2 = Zb[-1]
    Z = np.concatenate([Z1[:-1], Zb, ZR2 + (Y2[1:] - Y2[0])])
    if np.any(np.diff(Z) <= 0):
        raise ConstructionError("Z is not strictly increasing")
    alpha = -beta / Z[-1]
    return dict(r=r, z=z, zp=zp, zs=zs, Z=Z, alpha=alpha, P=P, i1=i1, i2=i2, kap=kap, h=h,
                z1=(z1, zp1, Z1), z2=(z2, zp2, Y2))


def build_f(domain, parts, B, beta):
    """Three-branch reaction term read off from f(Z(r)) = -(W z)'/W (r)."""
    r, z, zp, Z = parts["r"], parts["z"], parts["zp"], parts["Z"]
    i1, i2, P = parts["i1"], parts["i2"], parts["P"]
    R1 = r[i1]
    kap_a = float(domain.drift(domain.r_hi))
    Za = float(Z[-1])
    ZR1, ZR2 = float(Z[i1]), float(Z[i2])
    K = B * Za + 1.0 - beta * kap_a
    c0, c1, c2, cI = (np.ascontiguousarray(q.coef, dtype=float)
                      for q in (P, P.deriv(), P.deriv(2), P.integ()))
    pv = npoly.polyval
    Zb, tb = np.ascontiguousarray(Z[i1:i2 + 1]), np.ascontiguousarray(r[i1:i2 + 1] - R1)
    L = float(r[i2] - R1)

    def bridge_t(u):
        # Z is strictly increasing on the bridge: table guess, then Newton on Z(R1 + t) = u
        return _kernels.invert_bridge(np.ascontiguousarray(u, dtype=float), Zb, tb, cI, c0, c1,
                                      ZR1, L, 3)

    def mid_f(u):
        t, zz, dz = bridge_t(u)
        return -(dz + domain.drift(R1 + t) * zz)

    def mid_fp(u):
        t, zz, dz = bridge_t(u)
        rr = R1 + t
        return -(pv(t, c2) + domain.drift(rr) * dz + domain.drift_prime(rr) * zz) / zz

    def mid_F(u):
        # int_{R1}^{r(u)} f(Z(s)) z(s) ds by 16-point Gauss-Legendre in s
        t = bridge_t(u)[0]
        s = 0.5 * t[..., None] * (_GL_X + 1.0)
        zs = pv(s, c0)
        g = -(pv(s, c1) + domain.drift(R1 + s) * zs) * zs
        return 0.5 * t * np.sum(g * _GL_W, axis=-1)

    F_R1 = -0.5 * B * ZR1**2 - ZR1
    F_R2 = F_R1 + float(mid_F(np.array([ZR2]))[0])

    def piecewise(u, lo_fn, mid_fn, hi_fn):
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        out = np.empty_like(u)
        lo = u < ZR1
        hi = u > ZR2
        mid = ~(lo | hi) & np.isfinite(u)
        out[lo] = lo_fn(u[lo])
        out[hi] = hi_fn(u[hi])
        if np.any(mid):
            out[mid] = mid_fn(u[mid])
        out[~np.isfinite(u)] = np.nan
        return out[0] if scalar else out

    f = lambda u: piecewise(u, lambda x: -B * x - 1.0, mid_f, lambda x: -B * x + K)
    fp = lambda u: piecewise(u, lambda x: np.full_like(x, -B), mid_fp, lambda x: np.full_like(x, -B))
    F = lambda u: piecewise(u, lambda x: -0.5 * B * x * x - x,
                            lambda x: F_R1 + mid_F(x),
                            lambda x: F_R2 - 0.5 * B * (x * x - ZR2**2) + K * (x - ZR2))
    nl = Nonlinearity(f, fp, F, name="constructed",
                      params={"B": float(B), "beta": float(beta), "Z_R1": ZR1, "Z_R2": ZR2,
                              "Z_end": Za})
    nl.kind = "constructed"

    # the identities that let the linear branches reach Z(R1) and Z(R2)
    g = -(zp + parts["kap"] * z)
    scale = 1.0 + float(np.max(np.abs(g)))
    inner = float(np.max(np.abs(g[: i1 + 1] - (-B * Z[: i1 + 1] - 1.0))))
    outer = float(np.max(np.abs(g[i2:] - (-B * Z[i2:] + K))))
    gluing = {"inner_abs": inner, "outer_abs": outer, "scale": scale,
              "inner_rel": inner / scale, "outer_rel": outer / scale}
    if max(inner, outer) > 1e-6 * scale:
        raise ConstructionError(f"gluing residual too large: {max(inner, outer) / scale:.3e} (relative)")
    return nl, gluing


def build_w(pattern, m1=None, m2=None, l=None, check_positive=True):
    """Supersolution candidate: z corrected by -m1 z(R0)(r-R1)^{3l} left of R1, +m2 z(R3)(r-R2)^{3l} right of R2.

    Returns (w, w', w'') on the grid.
    """
    p = pattern.params
    m1 = p.m1 if m1 is None else m1
    m2 = p.m2 if m2 is None else m2
    l = p.l if l is None else l
    if l < 1 or l % 2 == 0:
        raise ValueError("l must be an odd positive integer")
    if m1 < 0 or m2 < 0:
        raise ValueError("m1 and m2 must be nonnegative")
    r, z = pattern.r, pattern.z
    k = 3 * l
    zR0 = float(np.interp(p.R0, r, z))
    zR3 = float(np.interp(p.R3, r, z))
    w, wp, ws = z.copy(), pattern.z_prime.copy(), pattern.z_second.copy()
    left = r < p.R1
    s = r[left] - p.R1
    c1 = m1 * zR0
    w[left] -= c1 * s**k
    wp[left] -= c1 * k * s ** (k - 1)
    ws[left] -= c1 * k * (k - 1) * s ** (k - 2)
    right = r > p.R2
    s = r[right] - p.R2
    c2 = m2 * zR3
    w[right] += c2 * s**k
    wp[right] += c2 * k * s ** (k - 1)
    ws[right] += c2 * k * (k - 1) * s ** (k - 2)
    if check_positive and np.any(w <= 0):
        i = int(np.argmax(w <= 0))
        raise ConstructionError(f"w is not positive at r = {r[i]:.6g}; adjust m1, m2 or l")
    return w, wp, ws


def choose_parameters(domain, window, beta, n, l=1):
    """Proof constants and the explicit starting values for m1, m2 and B."""
    R0, R1, R2, R3 = window
    h = domain.length / n
    snap = lambda x: domain.r_lo + h * round((x - domain.r_lo) / h)
    R0, R1, R2, R3 = map(snap, (R0, R1, R2, R3))
    rr = np.linspace(domain.r_lo, domain.r_hi, 4001)
    C = float(np.max(np.abs(domain.drift(rr))))
    Bbar = float(np.max(np.abs(domain.drift_prime(rr))))
    low_in = float(np.min(domain.drift_prime(np.linspace(R0, R1, 401))))
    low_out = float(np.min(domain.drift_prime(np.linspace(R2, R3, 401))))
    if low_in <= 0 or low_out <= 0 or np.min(domain.drift_prime(np.linspace(R0, R3, 801))) <= 0:
        raise NoConvexityWindow("convexity indicator is not positive on [R0, R3]")
    k = 3 * l
    d1 = R1 - domain.r_lo
    d2 = domain.r_hi - R2
    m1 = 0.5 * low_in / (k * d1 ** (k - 2) * (C * d1 + k - 1))
    m2 = 0.5 * low_out / (k * d2 ** (k - 2) * (C * d2 + k - 1))
    first = max(k * (k - 1 + C * d1) / (R1 - R0) ** 2, k * (k - 1 + C * d2) / (R3 - R2) ** 2)
    second = max((Bbar + k * m1 * (R1 - R0) ** (k - 2) * (C * d1 + k - 1)) / (m1 * (R1 - R0) ** k),
                 (Bbar + k * m2 * (R3 - R2) ** (k - 2) * (C * d2 + k - 1)) / (m2 * (R3 - R2) ** k))
    B = max(first, Bbar * (1.0 + 1e-6) + 1e-12)
    return PatternParams(R0, R1, R2, R3, float(beta), float(B), float(m1), float(m2), int(l), int(n),
                         Bbar, C, low_in, low_out, float(first), float(second))


def build(domain, params):
    """Deterministic construction for fixed parameters (no verification beyond the gluing test)."""
    if params.B <= params.Bbar:
        raise ConstructionError("B must exceed max |(W'/W)'|")
    parts = _assemble(domain, params.B, params.beta, params.R1, params.R2, params.n)
    f, gluing = build_f(domain, parts, params.B, params.beta)
    pat = PatternResult(domain, parts["r"], parts["z"], parts["zp"], parts["zs"], parts["Z"],
                        float(parts["alpha"]), f, params, parts["i1"], parts["i2"], parts["P"],
                        gluing=gluing)
    pat.w, pat.w_prime, pat.w_second = build_w(pat)
    return pat


def claim_margins(pattern, w=None, w_prime=None, w_second=None):
    """Pointwise supersolution inequality and the two boundary inequalities for w."""
    dom = pattern.domain
    r = pattern.r
    w = pattern.w if w is None else w
    wp = pattern.w_prime if w_prime is None else w_prime
    ws = pattern.w_second if w_second is None else w_second
    fpz = pattern.f.f_prime(pattern.Z)
    Lw = ws + dom.drift(r) * wp + fpz * w
    scale = float(np.max(np.abs(ws) + np.abs(dom.drift(r) * wp) + np.abs(fpz * w)))
    inner = Lw[1:-1]
    j = int(np.argmax(inner)) + 1
    a = pattern.alpha
    return {
        "interior_max": float(Lw[j]),
        "interior_max_r": float(r[j]),
        "interior_scale": scale,
        "interior_ok": bool(np.all(inner < -1e-12 * scale)),
        "boundary_inner": float(-wp[0] + a * w[0]),
        "boundary_outer": float(wp[-1] + a * w[-1]),
    }


def verify_claim(pattern, w=None, w_prime=None, w_second=None, eigen=True, k_max=4, n_eig=None):
    """Check every inequality of the construction and return the certificate.

    The certificate has ``passed`` plus the individual margins; ``failed`` names
    the first inequality that did not hold (None on success).
    """
    cert = {"failed": None}
    m = claim_margins(pattern, w, w_prime, w_second)
    cert.update(m)
    sol = pattern.solution()
    e27 = criteria.radial_instability(pattern.domain, sol)
    cert["boundary_sum"] = e27.witness
    cert["boundary_sum_negative"] = e27.details["boundary_negative"]
    if not m["interior_ok"]:
        cert["failed"] = f"interior supersolution inequality at r = {m['interior_max_r']:.6g}"
    elif not m["boundary_inner"] > 0:
        cert["failed"] = "left boundary inequality -w'(r_lo) + alpha w(r_lo) > 0"
    elif not m["boundary_outer"] > 0:
        cert["failed"] = "right boundary inequality w'(r_hi) + alpha w(r_hi) > 0"
    elif not e27.details["boundary_negative"]:
        cert["failed"] = "boundary sum is not negative"
    cert["claim_passed"] = cert["failed"] is None
    if cert["claim_passed"] and eigen:
        wv = pattern.w if w is None else w
        wpv = pattern.w_prime if w_prime is None else w_prime
        barta = criteria.barta_certificate(pattern.domain, sol, wv, w_prime=wpv)
        cert["barta_passed"] = barta.passed
        cert["barta_interior_max"] = barta.interior_max
        cert["barta_boundary"] = [barta.boundary_inner, barta.boundary_outer]
        lam = spectrum.lambda1_full(pattern.domain, sol, k_max=k_max, n=n_eig or pattern.params.n)
        cert["lambda1"] = lam.value
        cert["lambda1_discrete"] = lam.lambda1
        cert["lambda1_per_mode"] = {str(k): v for k, v in lam.per_mode.items()}
        if not barta.passed:
            cert["failed"] = "finite-difference supersolution check (Barta) failed"
        elif not lam.value > 0:
            cert["failed"] = "lambda_1 is not positive"
    cert["passed"] = cert["failed"] is None and cert.get("lambda1") is not None
    return cert


def rederive(pattern, n=None):
    """Shoot from c = 0 with the constructed (f, alpha) and compare with Z."""
    n = n or pattern.params.n
    sol, res = stationary.shoot(pattern.domain, pattern.f, pattern.alpha, 0.0, n, blowup=1e12)
    if n == pattern.params.n:
        ref = pattern.Z
    else:
        ref = np.interp(sol.grid, pattern.r, pattern.Z)
    dev = float(np.max(np.abs(sol.v - ref)))
    return {"max_abs_deviation": dev, "max_rel_deviation": dev / float(np.max(np.abs(ref))),
            "terminal_residual": res}


def construct_pattern(domain, beta=1.0, n=2048, l=None, window=None, B_cap=1e12, l_cap=99,
                      k_max=4, B=None, log=None):
    """Search (B, l) from the explicit starting bounds, doubling B, until the certificate passes.

    ``l`` fixes the exponent; by default l = 1, 3, 5, ... is tried in turn.
    A given ``B`` is tried alone (no search).
    """
    if hasattr(domain, "chi_prime"):
        ends = domain.chi_prime(np.array([domain.r_lo, domain.r_hi]))
        if np.any(ends <= 0):
            raise ConstructionError("profile has |psi'| = 1 at an end, so the boundary normal "
                                    "is not defined there")
    if window is None:
        _, window = locate_window(domain)
    ls = [l] if l is not None else list(range(1, l_cap + 1, 2))
    last = "no candidate tried"
    tried = []
    for ll in ls:
        params = choose_parameters(domain, window, beta, n, ll)
        Bv = params.B if B is None else float(B)
        while Bv <= B_cap:
            params.B = Bv
            try:
                pat = build(domain, params)
                cert = verify_claim(pat, k_max=k_max)
            except (ConstructionError, ValueError, FloatingPointError) as exc:
                cert = {"passed": False, "failed": str(exc)}
                pat = None
            tried.append({"l": ll, "B": Bv, "failed": cert.get("failed")})
            if log:
                log(f"l={ll} B={Bv:.6g}: {'pass' if cert['passed'] else cert['failed']}")
            if cert["passed"]:
                cert.update(pat.gluing and {"gluing": pat.gluing})
                cert["rederivation"] = rederive(pat)
                cert["search"] = tried
                cert["alpha"] = pat.alpha
                cert["k_max"] = k_max
                pat.certificate = cert
                return pat
            last = cert["failed"]
            if B is not None or "overflow" in str(last):
                break
            Bv *= 2.0
    raise ConstructionError(f"construction failed: {last}")


# -- artifact ------------------------------------------------------------------------------

ARTIFACT_FORMAT = "robinstab-pattern/1"


def to_artifact(pattern):
    """JSON-ready description from which :func:`from_artifact` rebuilds the same pattern."""
    return {"format": ARTIFACT_FORMAT, "geometry": dict(pattern.domain.spec),
            "params": pattern.params.as_dict(), "alpha": pattern.alpha,
            "k_max": pattern.certificate.get("k_max", 4), "certificate": pattern.certificate}


def from_artifact(doc):
    """Rebuild a pattern deterministically from its parameters and check alpha."""
    from .geometry import build_domain

    if doc.get("format") != ARTIFACT_FORMAT:
        raise ConstructionError(f"unsupported pattern artifact format {doc.get('format')!r}")
    domain = build_domain(doc["geometry"])
    pat = build(domain, PatternParams(**doc["params"]))
    stored = float(doc["alpha"])
    if abs(pat.alpha - stored) > 1e-12 * abs(stored):
        raise ConstructionError(f"rebuilt alpha {pat.alpha!r} differs from the stored {stored!r}")
    pat.certificate = dict(doc.get("certificate", {}))
    pat.certificate.setdefault("k_max", doc.get("k_max", 4))
    return pat
