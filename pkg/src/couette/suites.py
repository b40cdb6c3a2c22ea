"""Acceptance measurements shared by the test suite and the ``report`` command."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import damping, sobolev, spectral1d, stability, steady
from .profiles import ShearProfile


@dataclass
class Check:
    name: str
    measured: object
    target: str
    ok: bool


@dataclass
class CriterionResult:
    id: int
    title: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    limit: float = math.inf

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, measured, target, ok):
        self.checks.append(Check(name, _plain(measured), target, bool(ok)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def line(self) -> str:
        failed = [c.name for c in self.checks if not c.ok]
        status = "PASS" if self.passed else "FAIL"
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"[{status}] {self.id:2d}. {self.title}{tail}"


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - t0
        res.add("runtime_s", round(res.runtime, 3), f"< {res.limit:g}", res.runtime < res.limit)
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def limit_root() -> CriterionResult:
    res = CriterionResult(1, "limit root 2a = beta coth beta", limit=1.0)
    worst = 0.0
    for a in (0.6, 1.0, 2.0, 5.0):
        b = spectral1d.limit_beta(a).beta
        worst = max(worst, abs(2 * a - b / math.tanh(b)))
    res.add("max |2a - beta coth beta|", worst, "<= 1e-12", worst <= 1e-12)
    oracle = brentq(lambda b: b * math.cosh(b) - 2.0 * math.sinh(b), 0.5, 5.0, xtol=1e-15)
    b1 = spectral1d.limit_beta(1.0).beta
    res.add("beta(1)", b1, f"oracle {oracle:.12f} within 1e-9", abs(b1 - oracle) <= 1e-9)
    return res


@_timed
def eigen_convergence() -> CriterionResult:
    res = CriterionResult(2, "eigenvalue convergence towards the limit root", limit=30.0)
    a = 1.0
    study = spectral1d.convergence_study(a, [0.1, 0.05, 0.025, 0.0125])
    res.add("fitted exponent", study.exponent, ">= 0.4", study.exponent >= 0.4)
    lams = [r.lam for r in study.rows]
    res.add("lambdas", lams, "-16a^2 <= lambda < 0", all(-16 * a * a <= l < 0 for l in lams))
    res.add("errors", [r.error for r in study.rows], "decreasing", all(
        x > y for x, y in zip([r.error for r in study.rows], [r.error for r in study.rows][1:])))
    return res


@_timed
def critical_scaling() -> CriterionResult:
    res = CriterionResult(3, "H^s scaling of gamma exp(-(y/gamma)^2)", limit=60.0)
    for s in (0.0, 0.5, 1.0):
        fit = sobolev.gaussian_hs_scaling(s, [0.1, 0.05, 0.025])
        res.add(f"exponent s={s:g}", fit.exponent, f"{1.5 - s:g} +- 0.05",
                abs(fit.exponent - (1.5 - s)) <= 0.05)
    return res


BIF_GAMMA, BIF_A = 0.05, 1.0
BIF_STEPS = (1e-4, 5e-5, 2.5e-5)


@_timed
def bifurcation_branch() -> CriterionResult:
    res = CriterionResult(4, "bifurcation branch and cat's-eye streamlines", limit=300.0)
    prof = ShearProfile(BIF_GAMMA, BIF_A)
    lam, _, _ = spectral1d.converged_eigenvalue(prof)
    f = steady.build_nonlinearity(prof)
    grid = steady.SteadyGrid.for_profile(prof)
    branches = {h: steady.continue_branch(f, prof, -lam, h, 8, grid) for h in BIF_STEPS}
    worst = max(s.residual for b in branches.values() for s in b)
    res.add("max residual", worst, "<= 1e-9", worst <= 1e-9)
    ratios = [branches[h][0].remainder() / abs(branches[h][0].amplitude) for h in BIF_STEPS]
    res.add("remainder/|beta| at smallest step", ratios[-1], "<= 0.1", ratios[-1] <= 0.1)
    res.add("remainder/|beta| under halving", ratios, "decreasing",
            all(x > y for x, y in zip(ratios, ratios[1:])))
    small = branches[BIF_STEPS[-1]][:5]
    beta = np.array([s.amplitude for s in small])
    a2 = np.array([s.alpha_sq for s in small])
    c0, c2 = np.linalg.lstsq(np.column_stack((np.ones_like(beta), beta**2)), a2, rcond=None)[0]
    res.add("alpha^2(0) extrapolated vs -lambda", abs(c0 + lam), "<= 1e-3", abs(c0 + lam) <= 1e-3)
    res.add("alpha^2 at smallest beta vs -lambda", abs(a2[0] + lam), "(recorded)", True)
    amps = [abs(s.amplitude) for s in branches[BIF_STEPS[0]]]
    res.add("amplitudes increase", amps[-1], "monotone", all(x < y for x, y in zip(amps, amps[1:])))
    report = steady.classify_streamlines(branches[BIF_STEPS[0]][-1])
    kinds = sorted(p.kind for p in report.points)
    res.add("critical points", kinds, "one saddle + one center, cat's eye",
            report.cats_eye and kinds == ["center", "saddle"] and all(abs(p.y) < 0.05 for p in report.points))
    return res


MATCH_R = 1e-5
MATCH_BRACKET = (0.6, 1.0)
_match_cache: dict = {}


def matched_state():
    if "state" not in _match_cache:
        _match_cache["state"] = steady.match_period(0.05, 2 * math.pi, MATCH_R, MATCH_BRACKET)
    return _match_cache["state"]


@_timed
def period_matching() -> CriterionResult:
    res = CriterionResult(5, "period matching T = 2 pi", limit=600.0)
    state, samples = matched_state()
    err = abs(state.period - 2 * math.pi)
    res.add("|T - 2 pi|", err, "<= 1e-6 * 2 pi", err <= 1e-6 * 2 * math.pi)
    b1, b2 = steady.predicted_bracket(2 * math.pi, MATCH_BRACKET)
    res.add("limit bracket beta(a1) < 1 < beta(a2)", [b1, b2], "straddles 1", b1 < 1 < b2)
    a_t = state.profile.a
    res.add("a_T", a_t, f"in {MATCH_BRACKET}", MATCH_BRACKET[0] < a_t < MATCH_BRACKET[1])
    res.add("residual", state.residual, "<= 1e-9", state.residual <= 1e-9)
    return res


@_timed
def steady_euler() -> CriterionResult:
    res = CriterionResult(6, "steady-Euler advection residual", limit=300.0)
    state, _ = matched_state()
    grid = steady.SteadyGrid.for_profile(state.profile, 8.0)
    vals = []
    for _ in range(3):
        st = steady.state_at_amplitude(state.profile, MATCH_R, grid)
        vals.append(steady.advection_residual(st))
        grid = grid.refined()
    orders = [math.log2(x / y) for x, y in zip(vals, vals[1:])]
    res.add("advection residuals", vals, "decreasing", vals[0] > vals[1] > vals[2])
    res.add("observed orders", orders, ">= 1.5", min(orders) >= 1.5)
    return res


@_timed
def damping_rates() -> CriterionResult:
    res = CriterionResult(7, "linear damping rates", limit=120.0)
    mode = damping.cosine_mode(1)
    times = damping.log_times(10, 100, 12)
    fu = damping.decay_fit([mode], times, "u")
    fv = damping.decay_fit([mode], times, "v")
    res.add("u slope", fu.exponent, "in [-1.1, -0.9]", -1.1 <= fu.exponent <= -0.9)
    res.add("v slope", fv.exponent, "in [-2.1, -1.9]", -2.1 <= fv.exponent <= -1.9)
    rng = np.random.default_rng(7)
    agree = max(damping.solver_agreement(mode, t) for t in rng.uniform(0, 100, 20))
    res.add("green vs direct (20 random t)", agree, "<= 1e-8", agree <= 1e-8)
    return res


@_timed
def asymptotic_profile() -> CriterionResult:
    res = CriterionResult(8, "nonvanishing asymptotic profile t^2 e^{ikty} psi_k", limit=120.0)
    asym = damping.single_mode_asymptotics(damping.cosine_mode(1), [10, 20, 40, 80])
    bounds = [r.bound for r in asym.rows[:-1]]
    res.add("t * ||f_k(2t) - f_k(t)||", bounds, "bounded (max/min <= 2)", max(bounds) <= 2 * min(bounds))
    res.add("||f_k(80)||", asym.limit_norm, "> 1e-4", asym.nonvanishing)
    return res


@_timed
def stability_classifier() -> CriterionResult:
    res = CriterionResult(9, "stability classifier", limit=120.0)
    couette = ShearProfile.couette()
    verdicts = [stability.classify(couette, T).verdict for T in (1.0, 2 * math.pi, 100.0)]
    res.add("Couette at T in {1, 2pi, 100}", verdicts, "all Stable", all(v == "Stable" for v in verdicts))
    prof = ShearProfile(0.05, 1.0)
    v = stability.classify(prof, 2 * math.pi)
    res.add("U_{0.05,1} at T = 2pi", v.verdict, "Unstable", v.verdict == "Unstable")
    t_min = stability.unstable_period_window(prof).t_min
    ref = 2 * math.pi / 1.9
    res.add("T_min", t_min, f"{ref:.4f} +- 10%", abs(t_min - ref) <= 0.1 * ref)
    rng = np.random.default_rng(2024)
    out = []
    for _ in range(20):
        shear = stability.perturbed_shear(rng, 0.01 * rng.uniform(0.2, 1.0))
        out.append(stability.classify(shear, 2 * math.pi).verdict)
    res.add("20 perturbed profiles at T = 2pi", out.count("Stable"), "20 Stable", out.count("Stable") == 20)
    return res


def hardy_sweep(n: int, count: int = 200, seed: int = 10) -> list[float]:
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(count):
        y0 = float(rng.uniform(-0.95, 0.95))
        u = sobolev.band_limited_vanishing(rng, y0)
        ratios.append(sobolev.hardy_ratio(sobolev.Field1D.from_function(u, n), y0, 2.0, 1.0))
    return ratios


@_timed
def hardy_suite() -> CriterionResult:
    res = CriterionResult(10, "Hardy quotient sweep", limit=60.0)
    coarse, fine = hardy_sweep(513), hardy_sweep(1025)
    res.add("all finite", int(np.sum(np.isfinite(coarse))), "200", bool(np.all(np.isfinite(coarse + fine))))
    mc, mf = max(coarse), max(fine)
    res.add("max ratio (513 / 1025 samples)", [mc, mf], "within 2%", abs(mc - mf) <= 0.02 * mf)
    return res


ALL = {1: limit_root, 2: eigen_convergence, 3: critical_scaling, 4: bifurcation_branch,
       5: period_matching, 6: steady_euler, 7: damping_rates, 8: asymptotic_profile,
       9: stability_classifier, 10: hardy_suite}

TITLES = {
    1: "limit root 2a = beta coth beta",
    2: "eigenvalue convergence towards the limit root",
    3: "H^s scaling of gamma exp(-(y/gamma)^2)",
    4: "bifurcation branch and cat's-eye streamlines",
    5: "period matching T = 2 pi",
    6: "steady-Euler advection residual",
    7: "linear damping rates",
    8: "nonvanishing asymptotic profile t^2 e^{ikty} psi_k",
    9: "stability classifier",
    10: "Hardy quotient sweep",
}
