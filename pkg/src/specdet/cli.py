"""Command line front end: ``specdet <task> --config FILE [--out DIR] [--threads N] [--seed N]``.

Exit status: 0 success, 2 numerical warning (boundary classifiers, failed
cross-check, exponent mismatch), 1 hard error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfg
from .determinant import det_at, high_energy_check, low_energy_exponent
from .errors import AtUnperturbedPole, ConfigError, ExponentMismatch, SpecDetError
from .output import write_csv, write_json
from .resolvent import discretize, functional_trace_difference, trace_check, trace_norm_decay
from .scattering import jost, jost_trace
from .spectrum import default_k_grid, find_eigenvalues, levinson_check, phase_shift, spectral_shift, ssf_pairing

log = logging.getLogger("specdet")

EXIT_OK, EXIT_ERROR, EXIT_WARN = 0, 1, 2


class _Run:
    """Context for one scenario: output paths, worker pool size, warning flag."""

    def __init__(self, sc: cfg.Scenario, out: Path, threads: int, seed: int | None):
        self.sc, self.out, self.threads, self.seed = sc, out, max(1, threads), seed
        self.warn = False
        self.files: list[str] = []

    def path(self, stem: str) -> Path:
        p = self.out / f"{self.sc.name}_{stem}"
        self.files.append(str(p))
        return p

    def pmap(self, fn, items):
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.threads) as pool:
            return list(pool.map(fn, items))

    def meta(self) -> dict:
        return {**self.sc.describe(), "seed": self.seed}


def _zeta_grid(n: cfg.NumericSettings):
    if n.zeta:
        return list(n.zeta)
    return [1j * k for k in np.geomspace(n.kappa_min, n.kappa_max, n.n_kappa)]


def task_jost(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    rows = []
    for z in _zeta_grid(n):
        for e, p in enumerate(sc.potentials, start=1):
            jd = jost(p, z, edge=e, check_tail=True, tol_tail=n.tol_tail)
            rows.append([z.real, z.imag, e, *_ri(jd.w), *_ri(jd.wp), *_ri(jd.wdot), *_ri(jd.wpdot)])
    hdr = ["re_zeta", "im_zeta", "edge", "re_w", "im_w", "re_wp", "im_wp", "re_wdot", "im_wdot", "re_wpdot", "im_wpdot"]
    write_csv(r.path("jost.csv"), hdr, rows)
    if n.trace_x:
        z = _zeta_grid(n)[0]
        for e, p in enumerate(sc.potentials, start=1):
            tr = jost_trace(p, z, n.trace_x)
            write_csv(
                r.path(f"trace_edge{e}.csv"),
                ["x", "re_theta", "im_theta", "re_theta_prime", "im_theta_prime"],
                ([x, *_ri(u), *_ri(du)] for x, u, du in tr.to_rows()),
            )


def _ri(v: complex):
    return (v.real, v.imag)


def task_det(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    rows = []
    for z in _zeta_grid(n):
        try:
            dv = det_at(sc.potentials, sc.interaction, z)
            L = dv.L if dv.L is not None else complex(math.nan, math.nan)
            rows.append([z.real, z.imag, *_ri(dv.value), abs(dv.value), np.angle(dv.value), *_ri(L)])
        except AtUnperturbedPole:
            rows.append([z.real, z.imag] + [math.nan] * 6)
    write_csv(r.path("det.csv"), ["re_zeta", "im_zeta", "re_D", "im_D", "abs_D", "arg_D", "re_L", "im_L"], rows)
    report = {**r.meta()}
    if not sc.potentials.is_zero:
        he = high_energy_check(sc.potentials, sc.interaction, [10.0, 20.0, 40.0, 80.0])
        report["high_energy"] = {"kappa": he.kappas, "deviation": he.deviations, "exponent": he.exponent}
    write_json(r.path("det.json"), report)


def task_spectrum(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    ev = find_eigenvalues(sc.potentials, sc.interaction, n.kappa_search_max, include_cancelled=True)
    write_csv(
        r.path("eigen.csv"),
        ["kappa", "energy", "multiplicity", "abs_D", "shared_with_unperturbed"],
        ([e.kappa, e.energy, e.multiplicity, e.abs_D, e.cancelled] for e in ev),
    )
    report = {**r.meta(), "eigenvalues": [{"kappa": e.kappa, "energy": e.energy, "multiplicity": e.multiplicity} for e in ev]}
    if not sc.potentials.is_zero:
        curve = phase_shift(sc.potentials, sc.interaction, _k_grid(n))
        write_csv(r.path("phase.csv"), ["k", "eta", "abs_D"], curve.to_rows())
        report.update(eta0=curve.eta0, eta_inf=curve.eta_inf)
    write_json(r.path("spectrum.json"), report)


def _k_grid(n: cfg.NumericSettings):
    return default_k_grid(n.k_min, n.k_max)


def task_levinson(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    rep = levinson_check(sc.potentials, sc.interaction, k_grid=_k_grid(n), with_winding=n.winding)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ExponentMismatch)
        fit = low_energy_exponent(sc.potentials, sc.interaction, constants=rep.constants)
    payload = {
        **r.meta(),
        **rep.to_dict(),
        "low_energy": {"predicted": fit.predicted, "empirical": fit.empirical, "mismatch": fit.mismatch},
    }
    write_json(r.path("levinson.json"), payload)
    if rep.phase is not None:
        write_csv(r.path("phase.csv"), ["k", "eta", "abs_D"], rep.phase.to_rows())
    if rep.indeterminate or caught or not rep.passed:
        for w in caught:
            log.warning("%s", w.message)
        if rep.indeterminate:
            log.warning("Levinson integers indeterminate: %s", payload["warnings"])
        r.warn = True


def task_trace_check(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    checks = r.pmap(lambda t: trace_check(sc.potentials, sc.interaction, t, n.h_ladder, n.box), n.t_list)
    entries = []
    for c in checks:
        d = c.to_dict()
        d["passed"] = c.relative_deviation < 1e-3 if c.analytic != 0 else abs(c.extrapolated) < 1e-12
        entries.append(d)
        r.warn |= not d["passed"]
    write_json(r.path("trace_check.json"), {**r.meta(), "checks": entries})
    if sc.output.dump_matrix:
        discretize(sc.potentials, sc.interaction, min(n.h_ladder), n.box).dump(r.path("matrix.bin"))


def task_ssf(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    lams = np.linspace(n.lambda_min, n.lambda_max, n.n_lambda)
    ev = find_eigenvalues(sc.potentials, sc.interaction, n.kappa_search_max, include_cancelled=True)
    curve = None
    if not sc.potentials.is_zero:
        kmax = max(n.k_max, math.sqrt(max(n.lambda_max, 0.0)) * 1.2, math.sqrt(max(n.ssf_center + n.ssf_halfwidth, 0)) * 1.2)
        curve = phase_shift(sc.potentials, sc.interaction, default_k_grid(n.k_min, kmax))
    xi = spectral_shift(sc.potentials, sc.interaction, lams, eigen=ev, phase=curve)
    write_csv(r.path("ssf.csv"), ["lambda", "xi"], zip(lams, xi))
    f, fp = bump(n.ssf_center, n.ssf_halfwidth)
    support = (n.ssf_center - n.ssf_halfwidth, n.ssf_center + n.ssf_halfwidth)
    pairing = ssf_pairing(sc.potentials, sc.interaction, fp, support, eigen=ev, phase=curve)
    oracle = functional_trace_difference(sc.potentials, sc.interaction, f, support, n.h_ladder, n.ssf_box)
    rel = abs(pairing - oracle) / max(abs(oracle), 1e-12)
    passed = rel < 5e-2 or abs(pairing - oracle) < 1e-10
    r.warn |= not passed
    write_json(
        r.path("ssf.json"),
        {**r.meta(), "bump": {"center": n.ssf_center, "halfwidth": n.ssf_halfwidth},
         "xi_pairing": pairing, "oracle_trace": oracle, "relative_deviation": rel, "passed": passed},
    )


def bump(center: float, halfwidth: float):
    """Smooth compactly supported exp(-1/(1-u^2)) bump and its derivative."""

    def f(lam):
        u = (np.asarray(lam, float) - center) / halfwidth
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    def fprime(lam: float) -> float:
        u = (lam - center) / halfwidth
        if abs(u) >= 1:
            return 0.0
        q = 1.0 - u * u
        return math.exp(-1.0 / q) * (-2.0 * u / (q * q)) / halfwidth

    return f, fprime


def task_tracenorm(r: _Run) -> None:
    sc, n = r.sc, r.sc.numeric
    fit = trace_norm_decay(sc.potentials, sc.interaction, n.trace_norm_t, n.trace_norm_h, n.trace_norm_box)
    write_csv(r.path("tracenorm.csv"), ["t", "trace_norm"], zip(fit.t, fit.norms))
    passed = fit.slope is None or -1.7 <= fit.slope <= -1.3
    r.warn |= not passed
    write_json(r.path("tracenorm.json"), {**r.meta(), "t": fit.t, "norms": fit.norms, "slope": fit.slope, "passed": passed})


TASK_FUNCS = {
    "jost": task_jost,
    "det": task_det,
    "spectrum": task_spectrum,
    "levinson": task_levinson,
    "trace-check": task_trace_check,
    "ssf": task_ssf,
    "tracenorm": task_tracenorm,
}


def run(sc: cfg.Scenario, *, out: Path | None = None, threads: int = 1, seed: int | None = None) -> tuple[int, list[str]]:
    """Run one scenario; returns (exit status, written files)."""
    r = _Run(sc, Path(out) if out is not None else sc.output.dir, threads, seed)
    diags = cfg.validate(sc)
    for d in diags:
        (log.error if d.level == "error" else log.warning)("%s", d.message)
    if any(d.level == "error" for d in diags):
        return EXIT_ERROR, []
    r.warn = any(d.level == "warning" for d in diags)
    TASK_FUNCS[sc.task](r)
    return (EXIT_WARN if r.warn else EXIT_OK), r.files


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specdet", description=__doc__.splitlines()[0])
    p.add_argument("task", choices=[*cfg.TASKS, "validate"])
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="recorded in reports; all algorithms are deterministic")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=os.environ.get("SPECDET_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.task == "validate":
        diags = cfg.validate_file(args.config)
        for d in diags:
            print(d)
        if any(d.level == "error" for d in diags):
            return EXIT_ERROR
        return EXIT_WARN if diags else EXIT_OK
    try:
        sc = cfg.load(args.config)
        if sc.task != args.task:
            log.info("config task %s overridden by command line task %s", sc.task, args.task)
            sc.task = args.task
        status, files = run(sc, out=args.out, threads=args.threads, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SpecDetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for f in files:
        print(f)
    return status


if __name__ == "__main__":
    sys.exit(main())
