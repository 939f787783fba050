"""Rotationally symmetric geometry.

Two families share one radial interface (:class:`RadialDomain`):

* surfaces of revolution with metric ``dr^2 + psi(r)^2 dtheta^2`` on ``[r_lo, r_hi]``;
* annuli ``{rho <= r <= R}`` of model manifolds ``dr^2 + phi(r)^2 g_{S^{m-1}}``.

Everything downstream (shooting, spectra, criteria, evolution) only needs the
radial weight, its logarithmic derivative (the drift), the angular eigenvalue
term and the boundary data, so both families plug in the same way.
"""

from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import adaptive_simpson, derivative4, second_derivative4


class GeometryError(ValueError):
    """Invalid geometry: non-positive profile, point outside the domain, bad parameters."""


def sphere_area(m):
    """Area of the unit sphere S^{m-1} in R^m."""
    return 2.0 * pi ** (m / 2.0) / gamma(m / 2.0)


@dataclass(frozen=True)
class BoundaryData:
    """Mean curvature (outward normal, normalised trace) and size of each boundary component."""

    H_inner: float
    H_outer: float
    L_inner: float
    L_outer: float
    kappa_g_inner: float = 0.0
    kappa_g_outer: float = 0.0
    dim: int = 2

    @property
    def trace_inner(self):
        return (self.dim - 1) * self.H_inner

    @property
    def trace_outer(self):
        return (self.dim - 1) * self.H_outer


class RadialDomain:
    """Common interface of radially symmetric domains.

    Subclasses define ``weight`` (density of the volume form in r, without the
    angular factor), ``dweight`` and ``ddweight``; the rest is derived.
    """

    dim = 2
    r_lo = 0.0
    r_hi = 1.0
    name = "domain"
    _edge_tol = 1e-12

    @property
    def measure_factor(self):
        return sphere_area(self.dim)

    @property
    def length(self):
        return self.r_hi - self.r_lo

    def check(self, r):
        r = np.asarray(r, dtype=float)
        tol = self._edge_tol * max(1.0, abs(self.r_lo), abs(self.r_hi))
        if np.any(r < self.r_lo - tol) or np.any(r > self.r_hi + tol) or np.any(~np.isfinite(r)):
            raise GeometryError(f"r outside [{self.r_lo}, {self.r_hi}] for {self.name}")
        return r

    def grid(self, n):
        if n < 2:
            raise GeometryError("grid needs at least two intervals")
        return np.linspace(self.r_lo, self.r_hi, n + 1)

    # subclasses provide these three
    def weight(self, r):
        raise NotImplementedError

    def dweight(self, r):
        raise NotImplementedError

    def ddweight(self, r):
        raise NotImplementedError

    def density(self, r):
        """Volume density in r including the angular measure."""
        return self.measure_factor * self.weight(r)

    def drift(self, r):
        """First-order coefficient of the radial Laplacian, weight'/weight."""
        return self.dweight(r) / self.weight(r)

    def drift_prime(self, r):
        w = self.weight(r)
        return self.ddweight(r) / w - (self.dweight(r) / w) ** 2

    def angular(self, r, k):
        raise NotImplementedError

    def ricci(self, r):
        raise NotImplementedError

    def boundary(self):
        raise NotImplementedError

    def volume(self, tol=1e-10):
        return self.measure_factor * adaptive_simpson(lambda s: float(self.weight(s)),
                                                      self.r_lo, self.r_hi, tol)

    def radial_laplacian(self, r, u_r, u_rr):
        return u_rr + self.drift(r) * u_r

    @property
    def is_flat_radial(self):
        """True when the drift vanishes identically (cylinders)."""
        r = np.linspace(self.r_lo, self.r_hi, 65)
        return bool(np.all(np.abs(self.dweight(r)) <= 1e-14 * np.abs(self.weight(r))))


class ProfileSurface(RadialDomain):
    """Surface of revolution ``dr^2 + psi(r)^2 dtheta^2``.

    Parameters
    ----------
    psi, dpsi, ddpsi : callables
        Profile and its first two derivatives (vectorised).
    r_lo, r_hi : float
        Meridian interval.
    """

    dim = 2

    def __init__(self, psi, dpsi, ddpsi, r_lo, r_hi, name="profile", spec=None):
        if not (np.isfinite(r_lo) and np.isfinite(r_hi) and r_hi > r_lo):
            raise GeometryError("profile interval must satisfy r_lo < r_hi")
        self._psi, self._dpsi, self._ddpsi = psi, dpsi, ddpsi
        self.r_lo, self.r_hi = float(r_lo), float(r_hi)
        self.name = name
        self.spec = spec or {"kind": name}
        samples = np.linspace(self.r_lo, self.r_hi, 257)
        vals = np.asarray(psi(samples), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise GeometryError(f"profile {name} must be positive on [{r_lo}, {r_hi}]")
        d1 = np.asarray(dpsi(samples), dtype=float)
        if np.any(np.abs(d1) > 1.0 + self.unit_speed_tol):
            raise GeometryError(f"profile {name} is not unit speed: |psi'| > 1")
        self._spot_check(samples)

    unit_speed_tol = 1e-9

    def _spot_check(self, samples):
        # analytic derivatives must agree with central differences to O(h^2)
        h = 1e-4 * (self.r_hi - self.r_lo)
        r = samples[1:-1:16]
        r = r[(r - h > self.r_lo) & (r + h < self.r_hi)]
        if len(r) == 0:
            return
        p0, pm, pp = self._psi(r), self._psi(r - h), self._psi(r + h)
        d1p, d1m = self._dpsi(r + h), self._dpsi(r - h)
        fd1 = (pp - pm) / (2 * h)
        fd2 = (d1p - d1m) / (2 * h)
        scale1 = 1.0 + np.max(np.abs(p0)) / (self.r_hi - self.r_lo) ** 1
        scale2 = 1.0 + np.max(np.abs(self._ddpsi(r))) + np.max(np.abs(p0)) / (self.r_hi - self.r_lo) ** 2
        tol = 1e-5
        if (np.max(np.abs(fd1 - self._dpsi(r))) > tol * scale1
                or np.max(np.abs(fd2 - self._ddpsi(r))) > tol * scale2):
            raise GeometryError(f"derivatives supplied for {self.name} disagree with finite differences")

    @classmethod
    def from_samples(cls, r, psi, name="tabulated"):
        """Profile given only by uniform samples; derivatives by 4th-order differences."""
        r = np.asarray(r, dtype=float)
        psi = np.asarray(psi, dtype=float)
        h = r[1] - r[0]
        if not np.allclose(np.diff(r), h, rtol=1e-9, atol=0):
            raise GeometryError("tabulated profile needs a uniform grid")
        d1 = derivative4(psi, h)
        d2 = second_derivative4(psi, h)
        s0, s1, s2 = CubicSpline(r, psi), CubicSpline(r, d1), CubicSpline(r, d2)
        return cls(s0, s1, s2, r[0], r[-1], name=name, spec={"kind": name})

    def psi(self, r):
        return np.asarray(self._psi(self.check(r)), dtype=float)

    def dpsi(self, r):
        return np.asarray(self._dpsi(self.check(r)), dtype=float)

    def ddpsi(self, r):
        return np.asarray(self._ddpsi(self.check(r)), dtype=float)

    weight = psi
    dweight = dpsi
    ddweight = ddpsi

    def angular(self, r, k):
        return k * k / self.psi(r) ** 2

    def ricci(self, r):
        return -self.ddpsi(r) / self.psi(r)

    def chi_prime(self, r):
        """Height derivative of the profile curve, sqrt(1 - psi'^2)."""
        return np.sqrt(np.clip(1.0 - self.dpsi(r) ** 2, 0.0, None))

    def geodesic_curvature(self, r):
        """Geodesic curvature of the parallel {r = const} toward increasing r."""
        return self.drift(r)

    def convexity_indicator(self, r):
        """(psi'/psi)' = psi''/psi - (psi'/psi)^2."""
        return self.drift_prime(r)

    def laplacian(self, r, u_r, u_rr, u_thth):
        return u_rr + self.drift(r) * u_r + u_thth / self.psi(r) ** 2

    def boundary(self):
        lo, hi = self.r_lo, self.r_hi
        return BoundaryData(
            H_inner=float(self.dpsi(lo) / self.psi(lo)),
            H_outer=float(-self.dpsi(hi) / self.psi(hi)),
            L_inner=float(2 * pi * self.psi(lo)),
            L_outer=float(2 * pi * self.psi(hi)),
            kappa_g_inner=float(self.geodesic_curvature(lo)),
            kappa_g_outer=float(self.geodesic_curvature(hi)),
            dim=2,
        )

    def area(self, tol=1e-10):
        return self.volume(tol)

    def __repr__(self):
        return f"ProfileSurface({self.name}, [{self.r_lo}, {self.r_hi}])"


def ricci_model(model, r):
    return model.ricci_radial(r)


def model_area_volume(model, R):
    """(S(R), Vol(B_R)) for the geodesic ball of radius R."""
    return float(model.S(R)), float(model.volume(R))


def bochner_residual(surface, u, grid):
    """Max interior mismatch of the Bochner identity for a radial function.

    Both sides of 1/2 Lap|grad u|^2 = |Hess u|^2 + Ric(grad u, grad u) + <grad Lap u, grad u>
    are assembled from second-order central differences, so the residual is O(h^2).
    """
    r = np.asarray(grid, dtype=float)
    u = np.asarray(u, dtype=float)
    if len(r) < 8:
        raise GeometryError("Bochner check needs at least 8 grid points")
    h = r[1] - r[0]
    d1 = np.gradient(u, h, edge_order=2)
    d2 = np.gradient(d1, h, edge_order=2)
    kap = surface.drift(r)
    g2 = d1**2
    g2_r = np.gradient(g2, h, edge_order=2)
    g2_rr = np.gradient(g2_r, h, edge_order=2)
    lhs = 0.5 * (g2_rr + kap * g2_r)
    lap = d2 + kap * d1
    lap_r = np.gradient(lap, h, edge_order=2)
    rhs = d2**2 + (kap * d1) ** 2 + surface.ricci(r) * d1**2 + lap_r * d1
    # drop three points at each end where one-sided stencils pile up
    return float(np.max(np.abs(lhs - rhs)[3:-3]))


def boundary_data(domain):
    """Boundary mean curvatures (outward) and boundary sizes of a radial domain."""
    return domain.boundary()


def ricci_revolution(surface, r):
    return surface.ricci(r)


def geodesic_curvature(surface, r):
    return surface.geodesic_curvature(r)


def convexity_indicator(surface, r):
    return surface.convexity_indicator(r)


def laplacian_revolution(surface, r, u_r, u_rr, u_thth=0.0):
    return surface.laplacian(r, u_r, u_rr, u_thth)


# -- profile catalogue ---------------------------------------------------------

def cylinder(c=1.0, r_lo=0.0, r_hi=1.0):
    if c <= 0:
        raise GeometryError("cylinder radius must be positive")
    one = lambda r: np.full_like(np.asarray(r, dtype=float), c)
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return ProfileSurface(one, zero, zero, r_lo, r_hi, name="cylinder",
                          spec={"kind": "cylinder", "c": c, "interval": [r_lo, r_hi]})


def cone(c=1.0, k=0.5, r_lo=0.0, r_hi=1.0):
    """psi = c + k r. |k| = 1 is allowed: k = 1, c = 0 is the flat plane in polar form."""
    if abs(k) > 1:
        raise GeometryError("cone slope must satisfy |k| <= 1")
    return ProfileSurface(lambda r: c + k * np.asarray(r, dtype=float),
                          lambda r: np.full_like(np.asarray(r, dtype=float), k),
                          lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                          r_lo, r_hi, name="cone",
                          spec={"kind": "cone", "c": c, "k": k, "interval": [r_lo, r_hi]})


def catenoid(center=1.0, r_lo=0.0, r_hi=1.8):
    """psi = sqrt(1 + (r - center)^2), the catenoid in arc-length parametrisation."""
    def psi(r):
        return np.sqrt(1.0 + (np.asarray(r, dtype=float) - center) ** 2)

    def dpsi(r):
        s = np.asarray(r, dtype=float) - center
        return s / np.sqrt(1.0 + s * s)

    def ddpsi(r):
        s = np.asarray(r, dtype=float) - center
        return (1.0 + s * s) ** -1.5

    return ProfileSurface(psi, dpsi, ddpsi, r_lo, r_hi, name="catenoid",
                          spec={"kind": "catenoid", "center": center, "interval": [r_lo, r_hi]})


def sphere_zone(r_lo=0.5, r_hi=2.5):
    """psi = sin r on a zone of the unit sphere (0 < r_lo < r_hi < pi)."""
    if not (0 < r_lo < r_hi < pi):
        raise GeometryError("sphere zone needs 0 < r_lo < r_hi < pi")
    return ProfileSurface(lambda r: np.sin(r), lambda r: np.cos(r), lambda r: -np.sin(r),
                          r_lo, r_hi, name="sphere",
                          spec={"kind": "sphere", "interval": [r_lo, r_hi]})


def exponential(r_lo=-2.0, r_hi=0.0, rate=1.0):
    """psi = exp(rate r): constant curvature -rate^2 (unit speed needs rate e^{rate r} <= 1)."""
    return ProfileSurface(lambda r: np.exp(rate * np.asarray(r, dtype=float)),
                          lambda r: rate * np.exp(rate * np.asarray(r, dtype=float)),
                          lambda r: rate**2 * np.exp(rate * np.asarray(r, dtype=float)),
                          r_lo, r_hi, name="exponential",
                          spec={"kind": "exponential", "rate": rate, "interval": [r_lo, r_hi]})


def unduloid_like(r_lo=0.0, r_hi=2.0, c=1.0, eps=0.3, freq=2.0):
    """psi = c + eps sin(freq r): a wavy profile with sign-changing curvature."""
    if eps >= c:
        raise GeometryError("unduloid_like needs eps < c")
    return ProfileSurface(lambda r: c + eps * np.sin(freq * np.asarray(r, dtype=float)),
                          lambda r: eps * freq * np.cos(freq * np.asarray(r, dtype=float)),
                          lambda r: -eps * freq**2 * np.sin(freq * np.asarray(r, dtype=float)),
                          r_lo, r_hi, name="wavy",
                          spec={"kind": "wavy", "c": c, "eps": eps, "freq": freq,
                                "interval": [r_lo, r_hi]})


# -- model manifolds -----------------------------------------------------------

class ModelManifold:
    """Metric ``dr^2 + phi(r)^2 g_{S^{m-1}}`` on ``(0, r_max)``."""

    def __init__(self, phi, dphi, ddphi, dim, name="model", r_max=np.inf):
        if int(dim) != dim or dim < 2:
            raise GeometryError("model dimension must be an integer >= 2")
        self.phi, self.dphi, self.ddphi = phi, dphi, ddphi
        self.dim = int(dim)
        self.name = name
        self.r_max = r_max
        if abs(float(phi(0.0))) > 1e-12 or abs(float(dphi(0.0)) - 1.0) > 1e-9:
            raise GeometryError("model warping function needs phi(0) = 0 and phi'(0) = 1")
        top = min(r_max, 10.0)
        r = np.linspace(0.0, top, 513)[1:-1]
        if np.any(np.asarray(phi(r)) <= 0):
            raise GeometryError("model warping function must be positive on (0, r_max)")

    def check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0) or np.any(r >= self.r_max) or np.any(~np.isfinite(r)):
            raise GeometryError(f"r must lie in (0, {self.r_max}) for the {self.name} model")
        return r

    @property
    def omega(self):
        return sphere_area(self.dim)

    def S(self, r):
        """Area of the geodesic sphere of radius r."""
        return self.omega * np.asarray(self.phi(self.check(r)), dtype=float) ** (self.dim - 1)

    def ricci_radial(self, r):
        r = self.check(r)
        return -(self.dim - 1) * self.ddphi(r) / self.phi(r)

    def volume(self, R, tol=1e-10):
        """Volume of the geodesic ball of radius R."""
        self.check(R)
        return adaptive_simpson(lambda s: float(self.omega * self.phi(s) ** (self.dim - 1)),
                                0.0, float(R), tol)

    def mean_curvature(self, r):
        """Normalised mean curvature of the geodesic sphere toward increasing r."""
        return self.dphi(r) / self.phi(r)

    def annulus(self, rho, R):
        return ModelAnnulus(self, rho, R)


def euclidean(m=2):
    return ModelManifold(lambda r: np.asarray(r, dtype=float),
                         lambda r: np.ones_like(np.asarray(r, dtype=float)),
                         lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                         m, name="euclidean")


def round_sphere(m=2):
    return ModelManifold(np.sin, np.cos, lambda r: -np.sin(r), m, name="sphere", r_max=pi)


def hyperbolic(m=2):
    return ModelManifold(np.sinh, np.cosh, np.sinh, m, name="hyperbolic")


MODELS = {"euclidean": euclidean, "sphere": round_sphere, "hyperbolic": hyperbolic}


class ModelAnnulus(RadialDomain):
    """Annulus ``rho <= r <= R`` in a model manifold."""

    def __init__(self, model, rho, R):
        if not (0 < rho < R < model.r_max):
            raise GeometryError(f"annulus needs 0 < rho < R < {model.r_max}")
        self.model = model
        self.dim = model.dim
        self.r_lo, self.r_hi = float(rho), float(R)
        self.name = f"{model.name}{model.dim}-annulus"
        self.spec = {"kind": "model", "model": model.name, "dim": model.dim,
                     "interval": [float(rho), float(R)]}

    def weight(self, r):
        return np.asarray(self.model.phi(self.check(r)), dtype=float) ** (self.dim - 1)

    def dweight(self, r):
        r = self.check(r)
        m = self.dim
        phi = np.asarray(self.model.phi(r), dtype=float)
        return (m - 1) * phi ** (m - 2) * self.model.dphi(r)

    def ddweight(self, r):
        r = self.check(r)
        m = self.dim
        phi = np.asarray(self.model.phi(r), dtype=float)
        dphi = self.model.dphi(r)
        out = (m - 1) * phi ** (m - 2) * self.model.ddphi(r)
        if m > 2:
            out = out + (m - 1) * (m - 2) * phi ** (m - 3) * dphi**2
        return out

    def angular(self, r, k):
        return k * (k + self.dim - 2) / np.asarray(self.model.phi(self.check(r)), dtype=float) ** 2

    def ricci(self, r):
        return self.model.ricci_radial(self.check(r))

    def boundary(self):
        lo, hi = self.r_lo, self.r_hi
        return BoundaryData(
            H_inner=float(self.model.mean_curvature(lo)),
            H_outer=float(-self.model.mean_curvature(hi)),
            L_inner=float(self.model.S(lo)),
            L_outer=float(self.model.S(hi)),
            kappa_g_inner=float(self.model.mean_curvature(lo)),
            kappa_g_outer=float(self.model.mean_curvature(hi)),
            dim=self.dim,
        )

    def __repr__(self):
        return f"ModelAnnulus({self.model.name}, m={self.dim}, [{self.r_lo}, {self.r_hi}])"


@dataclass(frozen=True)
class PlaneAnnulus:
    """Flat annulus r0 <= |x| <= R with planar boundary curvatures."""

    r0: float
    R: float

    def __post_init__(self):
        if not (0 < self.r0 < self.R):
            raise GeometryError("plane annulus needs 0 < r0 < R")

    @property
    def kappa_inner(self):
        # inner circle bounds the hole: curvature w.r.t. the region is negative
        return -1.0 / self.r0

    @property
    def kappa_outer(self):
        return 1.0 / self.R

    def as_surface(self):
        """The same annulus as the surface of revolution psi(r) = r on [r0, R]."""
        s = cone(0.0, 1.0, self.r0, self.R)
        s.name = "plane"
        s.spec = {"kind": "plane", "interval": [self.r0, self.R]}
        return s

    def as_model(self):
        return ModelAnnulus(euclidean(2), self.r0, self.R)

    def boundary_curves(self, n_theta=256):
        """Sample points, arc-length weights and curvatures of both boundary circles."""
        th = np.linspace(0.0, 2 * pi, n_theta, endpoint=False)
        out = []
        for rad, kap in ((self.r0, self.kappa_inner), (self.R, self.kappa_outer)):
            pts = np.column_stack([rad * np.cos(th), rad * np.sin(th)])
            ds = np.full(n_theta, 2 * pi * rad / n_theta)
            out.append((pts, ds, np.full(n_theta, kap)))
        return out


def build_domain(spec):
    """Build a domain from a plain dict (the ``geometry`` block of a config file).

    ``interval: [lo, hi]`` is optional for profile surfaces (each has a default);
    shape parameters go in ``params`` or at the top level (the form of ``domain.spec``).
    """
    kind = spec.get("kind")
    p = {k: v for k, v in spec.items() if k not in ("kind", "interval", "params")}
    p.update(spec.get("params") or {})
    iv = spec.get("interval")
    span = {} if iv is None else {"r_lo": float(iv[0]), "r_hi": float(iv[1])}
    profiles = {"cylinder": cylinder, "cone": cone, "catenoid": catenoid, "sphere": sphere_zone,
                "exponential": exponential, "wavy": unduloid_like}
    try:
        if kind in profiles:
            return profiles[kind](**p, **span)
        if kind in ("plane", "model") and iv is None:
            raise GeometryError(f"geometry kind {kind!r} needs an interval [inner, outer]")
        if kind == "plane":
            return PlaneAnnulus(*span.values()).as_surface()
        if kind == "model":
            name = p.get("model", "euclidean")
            if name not in MODELS:
                raise GeometryError(f"unknown model {name!r}")
            return ModelAnnulus(MODELS[name](int(p.get("dim", 2))), *span.values())
    except TypeError as exc:
        raise GeometryError(f"bad geometry parameters: {exc}") from exc
    raise GeometryError(f"unknown geometry kind {kind!r}")
