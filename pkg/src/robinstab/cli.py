"""Command-line entry point: analyze, construct-pattern, simulate, eigen, report.

Exit codes: 0 success, 1 configuration error, 2 no stationary solution,
3 pattern construction failed.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, criteria, evolution, io, pattern, spectrum, stationary
from .config import ConfigError, load_config
from .geometry import GeometryError
from .nonlinearity import build_nonlinearity

log = logging.getLogger("robinstab")

EXIT_OK, EXIT_CONFIG, EXIT_NO_SOLUTION, EXIT_CONSTRUCTION = 0, 1, 2, 3


class NoSolution(RuntimeError):
    pass


# -- shared setup -----------------------------------------------------------------------

def _problem(cfg, need_alpha=True):
    """(domain, nonlinearity, alpha, pattern-or-None) from the config."""
    if cfg.nonlinearity is None:
        raise ConfigError("the 'nonlinearity' block is required for this command")
    if cfg.nonlinearity["kind"] == "constructed":
        try:
            pat = pattern.from_artifact(io.read_json(cfg.artifact))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"unreadable pattern artifact {cfg.artifact}: {exc}") from exc
        if cfg.geometry is not None and cfg.domain().spec != pat.domain.spec:
            raise ConfigError("geometry block does not match the pattern artifact")
        if cfg.alpha is not None and cfg.alpha != pat.alpha:
            raise ConfigError("alpha must be omitted or equal the artifact value for a constructed f")
        return pat.domain, pat.f, pat.alpha, pat
    domain = cfg.domain()
    try:
        f = build_nonlinearity(cfg.nonlinearity)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"nonlinearity: {exc}") from exc
    if cfg.alpha is None and need_alpha:
        raise ConfigError("alpha is required")
    return domain, f, cfg.alpha, None


def _spectral_settings(cfg, pat):
    """(n, k_max) for eigenvalues; a constructed pattern defaults to its certificate's settings."""
    raw = cfg.raw.get("spectrum", {})
    n, k_max = cfg.spectrum["n"], cfg.spectrum["k_max"]
    if pat is not None:
        n = raw.get("n", pat.params.n)
        k_max = raw.get("k_max", pat.certificate.get("k_max", k_max))
    return n, k_max


def _solutions(cfg, domain, f, alpha, pat):
    if pat is not None:
        return [pat.solution()]
    st = cfg.stationary
    sols = stationary.solve_stationary(domain, f, alpha, st["c_range"], n_scan=st["n_scan"],
                                       n=st["n"], blowup=st["blowup"], tol=st["tol"])
    log.info("found %d stationary solution(s)", len(sols))
    return sols


def _domain_doc(domain):
    return {"name": domain.name, "spec": dict(domain.spec), "dim": domain.dim,
            "interval": [domain.r_lo, domain.r_hi]}


# -- commands -------------------------------------------------------------------------

def cmd_analyze(cfg, out):
    domain, f, alpha, pat = _problem(cfg)
    sols = _solutions(cfg, domain, f, alpha, pat)
    n_eig, k_max = _spectral_settings(cfg, pat)
    doc = {"command": "analyze", "domain": _domain_doc(domain), "nonlinearity": cfg.nonlinearity,
           "alpha": alpha, "solutions": []}
    if cfg.analyze["constant_query"]:
        v = criteria.constant_solution(domain, alpha, float(f.f_prime(0.0)), float(f.f(0.0)))
        doc["constant_solution"] = v.as_dict()
    rows, text = [], []
    for i, sol in enumerate(sols):
        lam = spectrum.lambda1_full(domain, sol, k_max=k_max, n=n_eig,
                                    extrapolate=cfg.spectrum["extrapolate"])
        rep = criteria.assess(domain, sol, lambda1=lam.value, n=n_eig)
        val = stationary.validate(sol)
        entry = {"index": i, "c": sol.c, "max_abs": sol.norm(), "lambda1": lam.value,
                 "lambda1_discrete": lam.lambda1, "lambda1_per_mode": lam.per_mode,
                 "minimizing_mode": lam.mode_k,
                 "validation": {"ode_residual": val.ode_residual, "ode_residual4": val.ode_residual4,
                                "robin_inner": val.robin_inner, "robin_outer": val.robin_outer,
                                "valid": val.valid},
                 "energy": spectrum.energy(domain, sol, f, alpha),
                 "report": rep.as_dict()}
        if cfg.analyze["gradient_bound"]:
            lhs, rhs, scale = spectrum.gradient_bound(domain, sol, lam.value)
            entry["gradient_bound"] = {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "scale": scale,
                                       "holds": rhs - lhs >= -1e-6 * scale}
        if pat is not None:
            entry["certificate_lambda1"] = pat.certificate.get("lambda1")
            entry["rederivation"] = pattern.rederive(pat)
        doc["solutions"].append(entry)
        io.write_csv(out / f"solution_{i}.csv", ["r", "v", "v_prime"], sol.to_rows())
        io.write_csv(out / f"eigenfunction_{i}.csv", ["r", "phi"], lam.to_rows())
        rows.append([i, sol.c, sol.v[0], sol.v[-1], sol.norm(), lam.value,
                     rep.verdicts[0].witness])
        text.append(f"solution {i}: c = {sol.c:.17g}, max|v| = {sol.norm():.17g}")
        text.append(rep.table())
        text.append("")
    io.write_csv(out / "summary.csv",
                 ["index", "c", "v_inner", "v_outer", "max_abs", "lambda1", "boundary_sum"],
                 np.array(rows, dtype=float).reshape(-1, 7))
    io.write_json(out / "report.json", doc)
    if "constant_solution" in doc:
        cs = doc["constant_solution"]
        text.append(f"constant solution u = 0: {cs['holds']} {cs['note']}".rstrip())
    io.write_text(out / "report.txt", "\n".join(text) if text else "no stationary solution found")
    if not sols:
        raise NoSolution("no stationary solution found in the scanned range")
    print("\n".join(text))
    return doc


def cmd_construct(cfg, out):
    if cfg.geometry is None:
        raise ConfigError("the 'geometry' block is required for construct-pattern")
    domain = cfg.domain()
    p = cfg.pattern
    pat = pattern.construct_pattern(domain, beta=p["beta"], n=p["n"], l=p.get("l"),
                                    B_cap=p["B_cap"], k_max=p["k_max"], B=p.get("B"),
                                    log=log.info)
    art = pattern.to_artifact(pat)
    io.write_json(out / "pattern.json", art)
    io.write_json(out / "certificate.json", pat.certificate)
    io.write_csv(out / "profile.csv", ["r", "Z", "z", "z_prime", "w", "w_prime", "w_second"],
                 np.column_stack([pat.r, pat.Z, pat.z, pat.z_prime, pat.w, pat.w_prime,
                                  pat.w_second]))
    io.write_csv(out / "f_table.csv", ["u", "f", "f_prime"], pat.f_table())
    c = pat.certificate
    lines = [f"pattern on {domain.name}: B = {pat.params.B:.17g}, l = {pat.params.l}, "
             f"alpha = {pat.alpha:.17g}",
             f"boundary sum = {c['boundary_sum']:.17g} (negative: {c['boundary_sum_negative']})",
             f"interior max of L w = {c['interior_max']:.17g}",
             f"boundary inequalities: {c['boundary_inner']:.17g}, {c['boundary_outer']:.17g}",
             f"Barta check passed: {c['barta_passed']}",
             f"lambda1 = {c['lambda1']:.17g}",
             f"re-derived Z max deviation = {c['rederivation']['max_abs_deviation']:.3e}"]
    io.write_text(out / "certificate.txt", "\n".join(lines))
    print("\n".join(lines))
    return art


def _reference(cfg, domain, f, alpha, pat, n):
    ref = cfg.simulate["reference"]
    if ref == "pattern":
        if pat is None:
            raise ConfigError("simulate/reference 'pattern' needs a constructed nonlinearity")
        guess = evolution.resample(pat.solution(), n)
    elif ref == "zero":
        if float(f.f(0.0)) != 0.0:
            raise NoSolution("u = 0 is not a solution because f(0) != 0")
        guess = np.zeros(n + 1)
    elif pat is not None:
        guess = evolution.resample(pat.solution(), n)
    else:
        sols = _solutions(cfg, domain, f, alpha, None)
        if ref >= len(sols):
            raise NoSolution(f"stationary solution {ref} requested but {len(sols)} found")
        guess = evolution.resample(sols[ref], n)
    return evolution.discrete_equilibrium(domain, f, alpha, guess, n)


def cmd_simulate(cfg, out):
    domain, f, alpha, pat = _problem(cfg)
    s = cfg.simulate
    n = s["n"]
    u_star = _reference(cfg, domain, f, alpha, pat, n)
    k = s["mode_k"]
    two_d = "n_theta" in s or k > 0
    if two_d and "n_theta" not in s:
        raise ConfigError("simulate/n_theta is required for a non-radial perturbation")
    lam_k = None
    rng = np.random.default_rng(cfg.seed)
    if s["perturbation"] == "eigen":
        lam_k, phi = evolution.principal_mode(domain, f, alpha, u_star, n, mode_k=k)
    elif s["perturbation"] == "random":
        shape = (n + 1, s["n_theta"]) if two_d else (n + 1,)
        phi = rng.standard_normal(shape)
        phi /= np.max(np.abs(phi))
    else:
        phi = np.zeros(n + 1)
    eps = s["epsilon"]
    common = dict(reference=u_star, n_samples=s["n_samples"], safety=s["safety"])
    if two_d:
        nt = s["n_theta"]
        th = 2 * np.pi * np.arange(nt) / nt
        if phi.ndim == 1:
            phi = phi[:, None] * np.cos(k * th)[None, :]
        u0 = u_star[:, None] + eps * phi
        run = evolution.evolve_2d(domain, f, alpha, u0, s["T"], n, nt, dt=s.get("dt"), **common)
    else:
        u0 = u_star + eps * phi
        run = evolution.evolve_radial(domain, f, alpha, u0, s["T"], n, dt=s.get("dt"),
                                      method=s["method"], **common)
    trend = evolution.classify(run, tol_rate=s["tol_rate"], skip=s["skip"])
    doc = {"command": "simulate", "domain": _domain_doc(domain), "alpha": alpha,
           "nonlinearity": cfg.nonlinearity, "n": n, "dt": run.dt, "steps": run.steps, "T": run.T,
           "perturbation": s["perturbation"], "epsilon": eps, "mode_k": k, "seed": cfg.seed,
           "trend": trend.trend.value, "rate": trend.rate, "n_fit": trend.n_fit,
           "blowup": run.blowup, "lambda1_discrete": lam_k}
    if lam_k is not None and abs(lam_k) > 0:
        doc["rate_mismatch"] = abs(trend.rate + lam_k) / abs(lam_k)
    if pat is not None:
        doc["lambda1_certificate"] = pat.certificate.get("lambda1")
    io.write_csv(out / "trajectory.csv", ["t", "norm"], run.to_rows())
    if two_d:
        R, TH = np.meshgrid(run.grid, th, indexing="ij")
        io.write_csv(out / "final_state.csv", ["r", "theta", "u"],
                     np.column_stack([R.ravel(), TH.ravel(), run.u_final.ravel()]))
    else:
        io.write_csv(out / "final_state.csv", ["r", "u", "u_star"],
                     np.column_stack([run.grid, run.u_final, u_star]))
    io.write_json(out / "simulation.json", doc)
    msg = f"{trend.trend.value}: fitted rate {trend.rate:.17g}"
    if lam_k is not None:
        msg += f" (discrete -lambda1 = {-lam_k:.17g})"
    print(msg)
    return doc


def cmd_eigen(cfg, out):
    if cfg.nonlinearity is None:
        cfg.nonlinearity = {"kind": "zero"}
    domain, f, alpha, pat = _problem(cfg)
    n, k_max = _spectral_settings(cfg, pat)
    sp = cfg.spectrum
    if pat is not None:
        base = pat.solution()
    elif sp["base"] == "stationary":
        sols = _solutions(cfg, domain, f, alpha, None)
        if sp["index"] >= len(sols):
            raise NoSolution(f"stationary solution {sp['index']} requested but {len(sols)} found")
        base = sols[sp["index"]]
    else:
        if float(f.f(0.0)) != 0.0:
            raise NoSolution("u = 0 is not a solution because f(0) != 0")
        r = domain.grid(n)
        base = stationary.RadialSolution(r, np.zeros(n + 1), np.zeros(n + 1), alpha, domain, f,
                                         c=0.0, terminal_residual=0.0)
    modes = [spectrum.eigen_mode(domain, base, k, n, alpha, sp["extrapolate"])
             for k in range(k_max + 1)]
    vals = [m.value for m in modes]
    best = modes[int(np.argmin(vals))]
    io.write_csv(out / "eigen.csv", ["k", "lambda1", "lambda1_discrete"],
                 [[m.mode_k, m.value, m.lambda1] for m in modes])
    io.write_csv(out / "eigenfunction.csv", ["r", "phi"], best.to_rows())
    doc = {"command": "eigen", "domain": _domain_doc(domain), "alpha": alpha, "n": n,
           "lambda1": best.value, "minimizing_mode": best.mode_k,
           "per_mode": {m.mode_k: m.value for m in modes}, "base_max_abs": base.norm()}
    io.write_json(out / "eigen.json", doc)
    print(f"lambda1 = {best.value:.17g} (mode {best.mode_k})")
    return doc


def cmd_report(cfg, out):
    src = out if cfg is None or "source" not in cfg.report else cfg.resolve(cfg.report["source"])
    found = {name: io.read_json(src / name) for name in
             ("report.json", "certificate.json", "simulation.json", "eigen.json")
             if (src / name).is_file()}
    if not found:
        raise ConfigError(f"no results to report in {src}")
    lines = ["# robinstab results", ""]
    if "report.json" in found:
        rep = found["report.json"]
        lines += ["## Stationary solutions", "",
                  "| # | c | max abs | lambda1 | classification | holding criteria |",
                  "|---|---|---|---|---|---|"]
        for s in rep["solutions"]:
            holds = [v["criterion"] for v in s["report"]["verdicts"] if v["holds"] == "yes"]
            lines.append(f"| {s['index']} | {s['c']:.10g} | {s['max_abs']:.10g} | "
                         f"{s['lambda1']:.10g} | {s['report']['classification']} | "
                         f"{', '.join(holds) or '-'} |")
        lines.append("")
    if "certificate.json" in found:
        c = found["certificate.json"]
        lines += ["## Constructed pattern", "",
                  f"- passed: {c['passed']}",
                  f"- alpha: {c['alpha']:.17g}",
                  f"- boundary sum: {c['boundary_sum']:.17g}",
                  f"- lambda1: {c['lambda1']:.17g}",
                  f"- Barta check: {c['barta_passed']}",
                  f"- re-derivation deviation: {c['rederivation']['max_abs_deviation']:.3e}", ""]
    if "simulation.json" in found:
        s = found["simulation.json"]
        lines += ["## Time evolution", "",
                  f"- trend: {s['trend']}",
                  f"- fitted rate: {s['rate']}",
                  f"- discrete lambda1: {s['lambda1_discrete']}",
                  f"- steps: {s['steps']} (dt = {s['dt']:.6g})", ""]
    if "eigen.json" in found:
        e = found["eigen.json"]
        lines += ["## Principal eigenvalue", "",
                  f"- lambda1: {e['lambda1']:.17g} (mode {e['minimizing_mode']})", ""]
        lines += [f"- mode {k}: {v:.17g}" for k, v in sorted(e["per_mode"].items(),
                                                            key=lambda kv: int(kv[0]))]
        lines.append("")
    text = "\n".join(lines)
    io.write_text(out / "report.md", text)
    print(text)
    return found


COMMANDS = {
    "analyze": cmd_analyze,
    "construct-pattern": cmd_construct,
    "simulate": cmd_simulate,
    "eigen": cmd_eigen,
    "report": cmd_report,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="robinstab",
                                 description="Stability of Robin problems on rotationally "
                                             "symmetric domains.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "report",
                       help="YAML run configuration")
        p.add_argument("--out", type=Path, help="output directory (overrides output/dir)")
        p.add_argument("--verbose", "-v", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config) if args.config is not None else None
        if cfg is not None and cfg.command not in (None, args.command):
            log.warning("config was written for %r, running %r", cfg.command, args.command)
        if args.out is not None:
            out = args.out
        elif cfg is not None:
            out = cfg.resolve(cfg.output["dir"])
        else:
            out = Path("out")
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out)
    except (ConfigError, GeometryError, evolution.EvolutionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoSolution as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except pattern.ConstructionError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONSTRUCTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
