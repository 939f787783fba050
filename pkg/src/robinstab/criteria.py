"""Closed-form stability and instability criteria, and the aggregated report.

All strict inequalities are tested as ``x < -1e-10 * scale`` with
``scale = 1 + max|integrand|``; weak ones as ``x <= +1e-10 * scale``.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from . import spectrum
from .geometry import ModelAnnulus, PlaneAnnulus

REL = 1e-10
SMALL_U = 1e-12


class Holds(str, Enum):
    YES = "yes"
    NO = "no"
    NA = "n/a"


class Classification(str, Enum):
    UNSTABLE = "Unstable"
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    NEUTRALLY_STABLE = "NeutrallyStable"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    criterion: str
    holds: Holds
    witness: float = None
    kind: str = "instability"   # or "stability"
    details: dict = field(default_factory=dict)
    note: str = ""

    def as_dict(self):
        d = asdict(self)
        d["holds"] = self.holds.value
        return d


def _strict_neg(x, scale):
    return x < -REL * scale


def _weak_nonpos(x, scale):
    return x <= REL * scale


def _end_terms(domain, solution):
    """Per-end integrands alpha^3 u^2 + alpha u f(u) + alpha^2 (m-1) H u^2, times the end size."""
    bd = domain.boundary()
    a = solution.alpha
    f = solution.nonlinearity.f
    out = []
    for L, tr, u in ((bd.L_inner, bd.trace_inner, solution.v[0]),
                     (bd.L_outer, bd.trace_outer, solution.v[-1])):
        fu = float(f(u))
        terms = (a**3 * u * u, a * u * fu, a * a * tr * u * u)
        out.append((L, terms))
    return out


# -- planar domains --------------------------------------------------------------

@dataclass
class PlaneResult:
    C0: float
    C1: float
    C2: float
    verdict: Verdict
    c0_holds: bool
    c1_holds: bool
    c2_holds: object    # True/False, or None when f(u)/(alpha u) cannot be evaluated


def plane_criteria(curves, alpha, nonlinearity, radial=False):
    """Planar boundary criteria for instability.

    ``curves`` is a list of (u values, arc-length weights, curvature values),
    one per boundary component, sampled at the same points. The integral
    criterion uses alpha^3 u^2 - alpha^2 kappa u^2 + alpha u f(u); the
    pointwise one alpha - kappa + f(u)/(alpha u). For radial u the curvature
    lower bound alpha + kappa_min >= 0 is not needed.
    """
    if alpha == 0:
        raise ValueError("planar criteria need alpha != 0")
    a = float(alpha)
    c0 = 0.0
    mags = []
    c2 = -np.inf
    c2_ok = True
    kmin = np.inf
    for u, ds, kap in curves:
        u = np.asarray(u, dtype=float)
        kap = np.broadcast_to(np.asarray(kap, dtype=float), u.shape)
        ds = np.broadcast_to(np.asarray(ds, dtype=float), u.shape)
        fu = nonlinearity.f(u)
        integrand = a**3 * u * u - a * a * kap * u * u + a * u * fu
        c0 += float(np.sum(integrand * ds))
        mags.append(np.max(np.abs(integrand)))
        kmin = min(kmin, float(np.min(kap)))
        if np.any(np.abs(u) < SMALL_U):
            c2_ok = False
        else:
            c2 = max(c2, float(np.max(a - kap + fu / (a * u))))
    scale = 1.0 + max(mags)
    c1 = a + kmin
    c0_holds = _strict_neg(c0, scale)
    c1_holds = radial or c1 >= -REL * (1.0 + abs(kmin))
    c2_holds = (c2 < -REL * (1.0 + abs(c2))) if c2_ok else None
    holds = (c0_holds or bool(c2_holds)) and c1_holds
    v = Verdict("plane", Holds.YES if holds else Holds.NO, c0,
                details={"C0": c0, "C1": c1, "C2": c2 if c2_ok else None, "radial": radial})
    return PlaneResult(c0, c1, c2 if c2_ok else np.nan, v, c0_holds, c1_holds, c2_holds)


def annulus_plane_criteria(annulus, u_inner, u_outer, alpha, nonlinearity, n_theta=256):
    """Planar criteria for a radial function on a flat annulus."""
    curves = []
    for (pts, ds, kap), u in zip(annulus.boundary_curves(n_theta), (u_inner, u_outer)):
        curves.append((np.full(len(ds), float(u)), ds, kap))
    return plane_criteria(curves, alpha, nonlinearity, radial=True)


def annulus_example_expression(annulus, u_inner, u_outer, alpha, nonlinearity):
    """[r0 a + 1 + r0 f(u0)/(a u0)] u0^2 + [R a - 1 + R f(uR)/(a uR)] uR^2 (the C0 value / (2 pi a^2))."""
    r0, R, a = annulus.r0, annulus.R, float(alpha)
    f = nonlinearity.f
    t0 = (r0 * a + 1 + r0 * float(f(u_inner)) / (a * u_inner)) * u_inner**2
    t1 = (R * a - 1 + R * float(f(u_outer)) / (a * u_outer)) * u_outer**2
    return float(t0 + t1)


# -- rotationally symmetric domains ----------------------------------------------

def radial_instability(domain, solution, name=None):
    """Convexity + boundary-sign criterion for radial solutions.

    Needs -(W'/W)' >= 0 on the interval and a negative boundary sum
    sum_ends L [(m-1) H alpha^2 v^2 + alpha v f(v) + alpha^3 v^2].
    """
    r = domain.grid(max(512, solution.n))
    conv = -domain.drift_prime(r)
    conv_scale = 1.0 + float(np.max(np.abs(conv)))
    conv_min = float(np.min(conv))
    conv_ok = conv_min >= -REL * conv_scale
    ends = _end_terms(domain, solution)
    witness = sum(L * sum(t) for L, t in ends)
    scale = 1.0 + max(abs(L * x) for L, t in ends for x in t)
    neg = _strict_neg(witness, scale)
    crit = name or ("model" if isinstance(domain, ModelAnnulus) else "revolution")
    if not conv_ok:
        holds, note = Holds.NA, "convexity hypothesis fails"
    else:
        holds, note = (Holds.YES, "") if neg else (Holds.NO, "")
    return Verdict(crit, holds, float(witness),
                   details={"convexity_min": conv_min, "boundary_sum": float(witness),
                            "boundary_negative": bool(neg)}, note=note)


def revolution_instability(surface, solution, alpha=None):
    return radial_instability(surface, solution, "revolution")


def model_instability(annulus, solution, alpha=None):
    return radial_instability(annulus, solution, "model")


def constant_solution(domain, alpha, f_prime_at_0, f_at_0=0.0, n=2048, tol=1e-9):
    """Stability of u = 0 by comparing f'(0) with Lambda_1."""
    if f_at_0 != 0:
        return Verdict("constant", Holds.NA, None, kind="both",
                       note="no constant solution exists: f(0) != 0")
    lam = spectrum.linear_lambda(domain, alpha, n)
    gap = float(f_prime_at_0 - lam)
    if abs(gap) < tol * (1.0 + abs(lam)):
        return Verdict("constant", Holds.NA, gap, kind="both",
                       details={"Lambda1": lam, "classification": Classification.INCONCLUSIVE.value},
                       note="f'(0) equals Lambda_1")
    cls = Classification.UNSTABLE if gap > 0 else Classification.ASYMPTOTICALLY_STABLE
    return Verdict("constant", Holds.YES if gap > 0 else Holds.NO, gap, kind="both",
                   details={"Lambda1": lam, "classification": cls.value})


def cylinder_criteria(domain, solution, tangential=None, tol=1e-10):
    """Criteria i)-iii) for a solution depending only on the axial variable of a straight cylinder."""
    if not domain.is_flat_radial:
        return Verdict("cylinder", Holds.NA, None, note="domain is not a straight cylinder")
    if tangential is not None and np.max(np.ptp(np.asarray(tangential), axis=-1)) > tol:
        return Verdict("cylinder", Holds.NA, None, note="solution varies along the boundary curves")
    a = solution.alpha
    ends = _end_terms(domain, solution)
    witness = sum(L * (t[0] + t[1]) for L, t in ends)
    scale = 1.0 + max(abs(L * x) for L, t in ends for x in t[:2])
    nonzero = np.max(np.abs(solution.v)) > SMALL_U
    one_sign = bool(np.all(solution.v >= -SMALL_U) or np.all(solution.v <= SMALL_U))
    which = None
    if _strict_neg(witness, scale):
        which = "i"
    elif nonzero and a > 0 and _weak_nonpos(witness, scale):
        which = "ii"
    elif nonzero and a < 0 and one_sign and _weak_nonpos(witness, scale):
        which = "iii"
    if which is None:
        holds = Holds.NA if not nonzero else Holds.NO
    else:
        holds = Holds.YES
    return Verdict("cylinder", holds, float(witness),
                   details={"condition": which, "one_sign": one_sign})


def manifold_sufficient(domain, solution, n_t=201):
    """Ricci-nonnegative criteria: strict boundary sum, or weak sum plus sign conditions."""
    r = domain.grid(max(512, solution.n))
    ric = domain.ricci(r)
    ric_ok = float(np.min(ric)) >= -REL * (1.0 + float(np.max(np.abs(ric))))
    a = solution.alpha
    ends = _end_terms(domain, solution)
    witness = sum(L * sum(t) for L, t in ends)
    scale = 1.0 + max(abs(L * x) for L, t in ends for x in t)
    nonzero = np.max(np.abs(solution.v)) > SMALL_U
    one_sign = bool(np.all(solution.v >= -SMALL_U) or np.all(solution.v <= SMALL_U))
    # sampled form of the sign condition on t f(t) that makes the weak sum automatic
    T = 2.0 * max(1.0, float(np.max(np.abs(solution.v))))
    t = np.linspace(-T, T, n_t)
    tf = t * solution.nonlinearity.f(t)
    m = domain.dim
    if a > 0:
        auto = bool(np.all(tf <= -a * a * m * t * t + REL))
    elif a < 0:
        auto = bool(np.all(tf >= -a * a * m * t * t - REL))
    else:
        auto = False
    details = {"ricci_min": float(np.min(ric)), "boundary_sum": float(witness),
               "sign_condition_auto": auto}
    if not ric_ok:
        return Verdict("manifold", Holds.NA, float(witness), details=details,
                       note="Ricci curvature is negative somewhere")
    if _strict_neg(witness, scale):
        details["variant"] = "strict"
        return Verdict("manifold", Holds.YES, float(witness), details=details)
    if nonzero and _weak_nonpos(witness, scale) and (a > 0 or (a < 0 and one_sign)):
        details["variant"] = "weak"
        return Verdict("manifold", Holds.YES, float(witness), details=details)
    return Verdict("manifold", Holds.NO, float(witness), details=details)


def stable_solution_estimates(solution, domain, lambda1, power_params=None):
    """Necessary bounds satisfied by stable solutions when Ric >= 0 and alpha > 0.

    Linear f(u) = s u: s >= -[alpha^2 + (m-1) H_max alpha].
    Power f(u) = -c^2 u + |u|^{p-1} u: max|u|^{p-1} >= c^2 - alpha^2 - (m-1) H_max alpha.
    """
    a = solution.alpha
    if lambda1 is None or lambda1 < 0:
        return [Verdict("stable_estimates", Holds.NA, None, kind="stability",
                        note="solution is not stable")]
    r = domain.grid(256)
    if np.min(domain.ricci(r)) < -REL or a <= 0:
        return [Verdict("stable_estimates", Holds.NA, None, kind="stability",
                        note="needs Ric >= 0 and alpha > 0")]
    bd = domain.boundary()
    hmax = max(bd.trace_inner, bd.trace_outer)
    bound = -(a * a + hmax * a)
    nl = solution.nonlinearity
    out = []
    if nl.is_linear:
        s = nl.linear_slope
        out.append(Verdict("stable_estimates_linear", Holds.YES if s >= bound - REL else Holds.NO,
                           float(s - bound), kind="stability", details={"bound": bound}))
    params = power_params or (nl.params if nl.name == "power" else None)
    if params is not None:
        c, p = params["c"], params["p"]
        lhs = float(np.max(np.abs(solution.v)) ** (p - 1))
        rhs = bound + c * c
        out.append(Verdict("stable_estimates_power", Holds.YES if lhs >= rhs - REL else Holds.NO,
                           lhs - rhs, kind="stability", details={"bound": rhs}))
    if not out:
        out.append(Verdict("stable_estimates", Holds.NA, None, kind="stability",
                           note="nonlinearity is neither linear nor of power type"))
    return out


@dataclass
class BartaResult:
    passed: bool
    interior_max: float
    boundary_inner: float
    boundary_outer: float
    worst_index: int
    margin: float
    verdict: Verdict = None


def barta_certificate(domain, solution, w, alpha=None, w_prime=None, margin=0.0, exclude=()):
    """Positive supersolution test: Lap w + f'(v) w < -margin inside, dw/dnu + alpha w >= 0 on ends.

    The Laplacian is taken by second-order differences of the grid values of w;
    ``w_prime`` (analytic derivative) is used for the boundary tests when given.
    ``exclude`` lists node indices skipped in the interior test.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError(f"w must be positive; first violation at index {int(np.argmax(w <= 0))}")
    a = solution.alpha if alpha is None else alpha
    r = solution.grid
    h = solution.h
    # flux form of (W w')'/W
    Wm = domain.weight(0.5 * (r[:-1] + r[1:]))
    W = domain.weight(r)
    flux = Wm * np.diff(w) / h
    lap = (flux[1:] - flux[:-1]) / (h * W[1:-1])
    fp = solution.nonlinearity.f_prime(solution.v)
    interior = lap + fp[1:-1] * w[1:-1]
    mask = np.ones(len(interior), dtype=bool)
    for i in exclude:
        if 1 <= i <= len(r) - 2:
            mask[i - 1] = False
    vals = np.where(mask, interior, -np.inf)
    worst = int(np.argmax(vals)) + 1
    imax = float(np.max(vals))
    if w_prime is None:
        w_prime = np.gradient(w, h, edge_order=2)
    b0 = float(-w_prime[0] + a * w[0])
    b1 = float(w_prime[-1] + a * w[-1])
    passed = imax < -margin and b0 >= 0 and b1 >= 0
    v = Verdict("barta", Holds.YES if passed else Holds.NO, imax, kind="stability",
                details={"boundary_inner": b0, "boundary_outer": b1, "worst_r": float(r[worst])})
    return BartaResult(bool(passed), imax, b0, b1, worst, margin, v)


# -- aggregation --------------------------------------------------------------------

@dataclass
class StabilityReport:
    verdicts: list
    lambda1: float = None
    classification: Classification = Classification.INCONCLUSIVE
    criteria_classification: Classification = Classification.INCONCLUSIVE
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "classification": self.classification.value,
            "criteria_classification": self.criteria_classification.value,
            "lambda1": self.lambda1,
            "verdicts": [v.as_dict() for v in self.verdicts],
            **self.extra,
        }

    def table(self):
        lines = [f"{'criterion':<26}{'holds':<7}{'witness':>24}  note"]
        for v in self.verdicts:
            wit = "" if v.witness is None else f"{v.witness:.17g}"
            lines.append(f"{v.criterion:<26}{v.holds.value:<7}{wit:>24}  {v.note}")
        lam = "n/a" if self.lambda1 is None else f"{self.lambda1:.17g}"
        lines.append(f"lambda1 = {lam}")
        lines.append(f"classification = {self.classification.value} "
                     f"(criteria alone: {self.criteria_classification.value})")
        return "\n".join(lines)


def classify(verdicts, lambda1=None, tol=1e-6):
    """Headline classification. The computed lambda_1 takes precedence over sufficient conditions."""
    unstable = any(v.holds == Holds.YES and v.kind == "instability" for v in verdicts)
    for v in verdicts:
        if v.criterion == "constant" and v.details.get("classification"):
            if v.details["classification"] == Classification.UNSTABLE.value:
                unstable = True
    stable = any(v.holds == Holds.YES and v.criterion == "barta" for v in verdicts) or any(
        v.criterion == "constant"
        and v.details.get("classification") == Classification.ASYMPTOTICALLY_STABLE.value
        for v in verdicts)
    if unstable and not stable:
        crit = Classification.UNSTABLE
    elif stable and not unstable:
        crit = Classification.ASYMPTOTICALLY_STABLE
    else:
        crit = Classification.INCONCLUSIVE
    if lambda1 is None:
        return crit, crit
    if lambda1 < -tol:
        head = Classification.UNSTABLE
    elif lambda1 > tol:
        head = Classification.ASYMPTOTICALLY_STABLE
    else:
        head = Classification.NEUTRALLY_STABLE
    return head, crit


def assess(domain, solution, lambda1=None, compute_lambda=True, n=None, k_max=4,
           plane=None, extra_verdicts=()):
    """Run every applicable criterion on a radial solution and build the report."""
    verdicts = [radial_instability(domain, solution)]
    verdicts.append(manifold_sufficient(domain, solution))
    if domain.is_flat_radial:
        verdicts.append(cylinder_criteria(domain, solution))
    if plane is None and getattr(domain, "spec", {}).get("kind") == "plane":
        plane = PlaneAnnulus(domain.r_lo, domain.r_hi)
    if plane is not None and solution.alpha != 0:
        verdicts.append(annulus_plane_criteria(plane, solution.v[0], solution.v[-1],
                                               solution.alpha, solution.nonlinearity).verdict)
    if np.max(np.abs(solution.v)) == 0.0 and solution.alpha != 0:
        f0 = float(solution.nonlinearity.f(0.0))
        verdicts.append(constant_solution(domain, solution.alpha,
                                          float(solution.nonlinearity.f_prime(0.0)), f0,
                                          n=n or 2048))
    verdicts.extend(extra_verdicts)
    if lambda1 is None and compute_lambda:
        res = spectrum.lambda1_full(domain, solution, k_max=k_max, n=n or solution.n)
        lambda1 = res.value
    if lambda1 is not None and lambda1 >= 0:
        verdicts.extend(stable_solution_estimates(solution, domain, lambda1))
    head, crit = classify(verdicts, lambda1)
    return StabilityReport(verdicts, lambda1, head, crit)
