"""Reaction terms f(u) with derivative and antiderivative."""

import numpy as np
from numpy.polynomial import polynomial as P


class Nonlinearity:
    """A C^1 reaction term.

    ``F`` is the antiderivative with ``F(0) = 0`` (used by the energy).
    ``linear_slope`` is set when f is exactly linear, f(u) = slope * u.
    """

    def __init__(self, f, f_prime, F, name="f", params=None, linear_slope=None):
        self._f, self._fp, self._F = f, f_prime, F
        self.name = name
        self.params = dict(params or {})
        self.linear_slope = linear_slope

    def __call__(self, u):
        return self._f(np.asarray(u, dtype=float))

    def f(self, u):
        return self._f(np.asarray(u, dtype=float))

    def f_prime(self, u):
        return self._fp(np.asarray(u, dtype=float))

    def F(self, u):
        return self._F(np.asarray(u, dtype=float))

    @property
    def is_linear(self):
        return self.linear_slope is not None

    def spec(self):
        return {"kind": self.name, "params": self.params}

    def __repr__(self):
        return f"Nonlinearity({self.name}, {self.params})"


def polynomial(coeffs, name="polynomial"):
    """f(u) = sum_k coeffs[k] u^k."""
    c = np.asarray(coeffs, dtype=float)
    dc = P.polyder(c) if len(c) > 1 else np.zeros(1)
    Ic = P.polyint(c)
    slope = None
    if len(c) <= 2 or np.all(c[2:] == 0):
        if c[0] == 0:
            slope = float(c[1]) if len(c) > 1 else 0.0
    return Nonlinearity(lambda u: P.polyval(u, c), lambda u: P.polyval(u, dc) + 0 * u,
                        lambda u: P.polyval(u, Ic), name=name,
                        params={"coeffs": c.tolist()}, linear_slope=slope)


def zero():
    f = polynomial([0.0], name="zero")
    f.params = {}
    return f


def linear(lam):
    f = polynomial([0.0, lam], name="linear")
    f.params = {"lam": float(lam)}
    return f


def cubic(c1=1.0, c3=-1.0):
    """f(u) = c1 u + c3 u^3 (c1 = 1, c3 = -1 is the Allen-Cahn term)."""
    f = polynomial([0.0, c1, 0.0, c3], name="cubic")
    f.params = {"c1": float(c1), "c3": float(c3)}
    return f


def power(c=1.0, p=3.0):
    """f(u) = -c^2 u + |u|^{p-1} u."""
    if p <= 1:
        raise ValueError("power nonlinearity needs p > 1")

    def f(u):
        return -c * c * u + np.abs(u) ** (p - 1) * u

    def fp(u):
        return -c * c + p * np.abs(u) ** (p - 1)

    def F(u):
        return -0.5 * c * c * u * u + np.abs(u) ** (p + 1) / (p + 1)

    return Nonlinearity(f, fp, F, name="power", params={"c": float(c), "p": float(p)})


def affine_linear(slope, offset):
    """f(u) = slope u + offset (not odd; F(u) = slope u^2/2 + offset u)."""
    f = polynomial([offset, slope], name="affine")
    f.params = {"slope": float(slope), "offset": float(offset)}
    return f


BUILDERS = {
    "zero": lambda **kw: zero(),
    "linear": lambda lam=0.0: linear(lam),
    "cubic": cubic,
    "power": power,
    "polynomial": lambda coeffs: polynomial(coeffs),
    "affine": affine_linear,
}


def build_nonlinearity(spec):
    """Build from the ``nonlinearity`` block of a config (constructed terms are handled by the CLI)."""
    kind = spec.get("kind")
    if kind not in BUILDERS:
        raise ValueError(f"unknown nonlinearity kind {kind!r}")
    return BUILDERS[kind](**(spec.get("params") or {}))
