"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--n 2048] [--repeat 5]

Each kernel is timed on inputs of the size used by the library defaults, and
the two backends' outputs are compared so a speed-up never hides a mismatch.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from robinstab import _kernels
from robinstab import geometry, spectrum


def _inputs(n):
    dom = geometry.catenoid(1.0, 0.0, 1.8)
    prob = spectrum.discretize(dom, None, 0, n, alpha=-0.5, fprime=np.full(n + 1, 2.0))
    d, e, _ = prob.standard_form()
    d, e = np.ascontiguousarray(d), np.ascontiguousarray(e)
    e2 = e * e
    rad = np.zeros_like(d)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo, hi = float(np.min(d - rad)) - 1e-9, float(np.max(d + rad)) + 1e-9
    rhs = np.linspace(1.0, 2.0, n + 1)
    rh = np.linspace(0.0, 1.8, 2 * n + 1)
    p = np.ascontiguousarray(dom.drift(rh))
    q = np.ascontiguousarray(dom.drift_prime(rh) - 50.0)
    c0 = np.array([1.0, 0.5, 0.2, 0.1, 0.05, 0.01])
    cI = np.r_[0.0, c0 / np.arange(1, 7)]
    c1 = c0[1:] * np.arange(1, 6)
    tk = np.linspace(0.0, 0.4, 400)
    zk = np.polynomial.polynomial.polyval(tk, cI)
    u = np.linspace(zk[0], zk[-1], n + 1)
    return {
        "sturm_count": (d, e2, 0.5 * (lo + hi)),
        "bisect_smallest": (d, e2, lo, hi, 1e-13 * max(abs(lo), abs(hi)), 400),
        "tridiag_solve": (e, np.ascontiguousarray(d - lo), e, rhs),
        "rk4_linear": (p, q, 1.8 / n, 0.0, 1.0),
        "invert_bridge": (u, zk, tk, cI, c0, c1, 0.0, 0.4, 3),
        # the time stepper calls it on the few nodes inside the bridge
        "invert_bridge/40": (np.ascontiguousarray(u[::max(1, n // 40)]), zk, tk, cI, c0, c1,
                             0.0, 0.4, 3),
    }


END_TO_END = """
import time
from robinstab import geometry, spectrum, pattern
dom = geometry.catenoid(1.0, 0.0, 1.8)
t = time.perf_counter()
spectrum.linear_lambda(dom, -0.5, n={n})
t1 = time.perf_counter()
pattern.construct_pattern(dom, n={n}, k_max=2)
t2 = time.perf_counter()
print(t1 - t, t2 - t1)
"""


def end_to_end(n):
    """Wall time of an eigenvalue and of a full construction under each backend (subprocesses)."""
    out = {}
    for label, flag in (("python", "1"), ("compiled", "0")):
        env = dict(os.environ, ROBINSTAB_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env,
                             capture_output=True, text=True, check=True)
        out[label] = [float(x) for x in res.stdout.split()]
    return out


def _max_diff(a, b):
    if isinstance(a, tuple):
        return max(_max_diff(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(a))))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true",
                    help="also time an eigenvalue and a pattern construction per backend")
    args = ap.parse_args(argv)
    py, cc = _kernels.python_backend, _kernels.compiled_backend
    if cc is None:
        print("compiled backend not built; nothing to compare")
        return 1
    cases = _inputs(args.n)
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<18}{'python [ms]':>14}{'compiled [ms]':>16}{'speed-up':>11}{'rel diff':>12}")
    for name, inp in cases.items():
        fp, fc = getattr(py, name.split("/")[0]), getattr(cc, name.split("/")[0])
        number = 1 if name == "bisect_smallest" else 3
        tp = min(timeit.repeat(lambda: fp(*inp), number=number, repeat=args.repeat)) / number
        tc = min(timeit.repeat(lambda: fc(*inp), number=number * 50, repeat=args.repeat)) / (number * 50)
        diff = _max_diff(fp(*inp), fc(*inp))
        print(f"{name:<18}{1e3 * tp:>14.3f}{1e3 * tc:>16.4f}{tp / tc:>10.1f}x{diff:>12.1e}")
    if args.end_to_end:
        res = end_to_end(args.n)
        print()
        print(f"{'workflow':<18}{'python [s]':>14}{'compiled [s]':>16}{'speed-up':>11}")
        for i, name in enumerate(("linear_lambda", "construct_pattern")):
            tp, tc = res["python"][i], res["compiled"][i]
            print(f"{name:<18}{tp:>14.2f}{tc:>16.2f}{tp / tc:>10.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
