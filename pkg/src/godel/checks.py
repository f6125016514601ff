"""Acceptance checks with measured residuals, shared by ``godel verify`` and the test suite.

Each check returns a :class:`CheckResult` whose items compare a measured
value against a named tolerance.  Tolerances can be overridden globally or
by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import analysis, charts, curvature, oracle
from .errors import NotTimelikeError
from .extremals import ALPHA_ISOTROPIC, ISOTROPIC, TIMELIKE, GeodesicParams, closed_form_array, closed_form_position, max_abs_phi3, pmp_check
from .group import SQRT2

DEFAULT_TOLERANCES = {
    "oracle_deviation": 1e-7,
    "conservation_rate": 1e-9,
    "integral": 1e-9,
    "drift_formula": 1e-12,
    "x0_at_period": 1e-10,
    "shift_constancy": 1e-10,
    "return_threshold": 1e-8,
    "drift_match": 1e-10,
    "scalar_curvature": 1e-8,
    "fluid_structure": 1e-8,
    "einstein": 1e-8,
    "vorticity": 1e-6,
    "horizon": 1e-12,
    "kundt_pullback": 1e-8,
    "cylindrical_pullback": 1e-6,
    "x2_sup_window": 1e-3,
    "bound_slack": 1e-9,
    "alpha_limit": 1e-5,
    "golden_closed_form": 1e-10,
    "golden_oracle": 1e-7,
    "pmp_minimum": 1e-6,
    "pmp_argmin": 1e-4,
}


@dataclass
class Item:
    label: str
    measured: float
    limit: float
    passed: bool


@dataclass
class CheckResult:
    number: int
    title: str
    items: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def within(self, label, measured, limit):
        self.items.append(Item(label, float(measured), float(limit), bool(measured <= limit)))

    def holds(self, label, condition, measured=float("nan"), limit=float("nan")):
        self.items.append(Item(label, float(measured), float(limit), bool(condition)))

    def line(self) -> str:
        worst = next((i for i in self.items if not i.passed), None)
        tag = "PASS" if self.passed else "FAIL"
        detail = f"{worst.label}: {worst.measured:.3e} vs {worst.limit:.3e}" if worst else f"{len(self.items)} checks"
        return f"[{tag}] criterion {self.number:2d} {self.title} ({detail})"

    def table(self) -> str:
        rows = [self.line()]
        for i in self.items:
            mark = "ok " if i.passed else "BAD"
            rows.append(f"    {mark} {i.label:<44s} measured {i.measured:>12.5e}  limit {i.limit:>10.3e}")
        rows.extend(f"    note: {n}" for n in self.notes)
        return "\n".join(rows)


def resolve_tolerances(overrides=None) -> dict:
    """Merge overrides: a bare number replaces every tolerance, names replace one."""
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key is None or key == "*":
            tol = {k: float(value) for k in tol}
        elif key in tol:
            tol[key] = float(value)
        else:
            raise KeyError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
    return tol


def oracle_grid() -> list:
    """Both classes, phi3 in {0, +-0.3, +-0.7 bound}, t0 in {0, pi/(2 omega), pi/omega}: 60 extremals."""
    grid = []
    for kind, phi0 in [(ISOTROPIC, 1.0), (TIMELIKE, 1.25), (TIMELIKE, math.sqrt(3.0)), (TIMELIKE, 2.5)]:
        bound = max_abs_phi3(kind, phi0)
        for phi3 in (0.0, 0.3, -0.3, 0.7 * bound, -0.7 * bound):
            omega = GeodesicParams.make(kind, phi0, phi3).omega
            for t0 in (0.0, math.pi / (2.0 * omega), math.pi / omega):
                grid.append(GeodesicParams.make(kind, phi0, phi3, t0))
    return grid


@lru_cache(maxsize=1)
def _oracle_run(h: float = 1e-3):
    from .extremals import psi_at

    grid = oracle_grid()
    spec = oracle.godel_spec(4)
    times = oracle.span_times((-2.0 * math.pi, 2.0 * math.pi), h)
    psi, gam = oracle.integrate_batch(spec, np.array([psi_at(p, 0.0) for p in grid]), times, oracle.IntegratorConfig(h=h))
    return grid, times, psi, spec.readout(gam)


def check_oracle_agreement(tol) -> CheckResult:
    res = CheckResult(1, "closed form vs RK4 oracle")
    grid, times, _, numeric = _oracle_run()
    dev = max(float(np.max(np.abs(closed_form_array(p, times) - numeric[i]))) for i, p in enumerate(grid))
    res.holds("grid size >= 50", len(grid) >= 50, len(grid), 50)
    res.within("max |closed form - oracle| on [-2pi, 2pi]", dev, tol["oracle_deviation"])
    return res


def check_conservation(tol) -> CheckResult:
    res = CheckResult(2, "conserved quantities along oracle")
    _, times, psi, _ = _oracle_run()
    mon = oracle._monitors(oracle.godel_spec(4), psi, psi * oracle.godel_spec(4).control_weights())
    i0 = int(np.argmin(np.abs(times)))
    dt = np.abs(times - times[i0])
    mask = dt > 0
    for name in ("psi0", "psi3", "psi12", "uu"):
        rate = np.max(np.abs(mon[name][:, mask] - mon[name][:, [i0]]) / dt[mask])
        res.within(f"|d {name}| per unit t", rate, tol["conservation_rate"])
    return res


def check_drift_integral(tol) -> CheckResult:
    res = CheckResult(3, "isotropic drift and its integral form")
    iso = GeodesicParams.make(ISOTROPIC)
    value = analysis.cos_ratio_integral()
    exact = 2.0 * (SQRT2 - 1.0) * math.pi
    res.within("|integral + pi|", abs(value + math.pi), tol["integral"])
    res.within("|drift formula - 2(sqrt2-1)pi|", abs(analysis.drift_per_period(iso) - exact), tol["drift_formula"])
    res.within("|x0(2pi) - T|", abs(closed_form_position(iso, 2.0 * math.pi).x0 - exact), tol["x0_at_period"])
    res.within("max |x0(t+2pi) - x0(t) - T| (64 pts)", analysis.period_shift_residual(iso), tol["shift_constancy"])
    res.notes.append(f"integral = {value:.17g}")
    return res


def check_no_closed_geodesic(tol) -> CheckResult:
    res = CheckResult(4, "no closed causal geodesic audit")
    reports = analysis.no_closed_geodesic_audit(oracle_grid(), resolution=1e-4, threshold=tol["return_threshold"])
    spurious = sum(len(r.spurious_returns) for r in reports)
    res.holds("spurious simultaneous returns", spurious == 0, spurious, 0)
    res.holds("all verdicts 'no closed geodesic'", all(r.verdict == analysis.NO_CLOSURE for r in reports))
    res.holds("drift > 0 everywhere", all(r.drift > 0 for r in reports if r.drift is not None), min(r.drift for r in reports if r.drift is not None), 0)
    res.within("max |x1|+|x2| at t = P", max(r.return_gap for r in reports if r.return_gap is not None), tol["return_threshold"])
    res.within("max |x0(P) - drift|", max(r.drift_mismatch for r in reports if r.drift_mismatch is not None), tol["drift_match"])
    expect = []
    for r in reports:
        p = r.params
        if p.phi3 != 0.0:
            continue
        if p.kind == ISOTROPIC:
            expect.append(abs(r.drift - 2.0 * math.pi * (SQRT2 - 1.0)))
        else:
            expect.append(abs(r.drift - 2.0 * math.pi * (SQRT2 - p.phi0 / math.sqrt(p.phi0**2 + 1.0))))
    res.within("max |drift - class formula| (phi3 = 0)", max(expect), tol["drift_match"])
    return res


def check_curvature(tol, n: int = 100, seed: int = 0) -> CheckResult:
    res = CheckResult(5, "Ricci, Einstein equations, vorticity")
    pts = np.random.default_rng(seed).uniform(-3.0, 3.0, size=(n, 4))
    r_err = fluid = ein = vort = 0.0
    for p in pts:
        rep = curvature.curvature_report(p)
        r_err = max(r_err, abs(rep.scalar - 1.0))
        fluid = max(fluid, rep.perfect_fluid_residual)
        ein = max(ein, rep.einstein_residual)
        vort = max(vort, abs(rep.vorticity - 1.0 / SQRT2))
    res.within("max |R - 1|", r_err, tol["scalar_curvature"])
    res.within("max |R_ik - u_i u_k|", fluid, tol["fluid_structure"])
    res.within("max Einstein residual (Lambda = -1/2)", ein, tol["einstein"])
    res.within("max |omega - 1/sqrt2|", vort, tol["vorticity"])
    return res


def check_horizon(tol) -> CheckResult:
    res = CheckResult(6, "horizon and closed timelike circle")
    g = charts.metric_cylindrical(charts.horizon_radius()).components[2, 2]
    res.within("|g_phiphi(ln(1+sqrt2))|", abs(g), tol["horizon"])
    w = charts.ctc_witness(1.0, n=1000)
    res.holds("r = 1 circle timelike at all 1000 samples", bool(np.all(w.tangent_norms > 0)) and w.closed, float(np.min(w.tangent_norms)), 0)
    try:
        charts.ctc_witness(0.5)
        rejected = False
    except NotTimelikeError as exc:
        rejected = exc.causal.tag == charts.SPACELIKE
    res.holds("r = 0.5 circle rejected as spacelike", rejected)
    return res


def check_chart_pullbacks(tol) -> CheckResult:
    res = CheckResult(7, "chart pullback coherence")
    k = charts.pullback_residual(charts.KUNDT, n=100)
    c = charts.pullback_residual(charts.CYLINDRICAL, n=100)
    res.within("Kundt pullback residual", k.residual, tol["kundt_pullback"])
    res.within("cylindrical pullback residual", c.residual, tol["cylindrical_pullback"])
    return res


def check_bounds(tol) -> CheckResult:
    res = CheckResult(8, "bounding scan of the planar projection")
    rep = analysis.bounding_scan(analysis.default_bound_grid(), tol=tol["bound_slack"])
    target = 2.0 + SQRT2
    below = target - rep.x2_sup
    res.within("2+sqrt2 - sup|x2| (lower window)", below, tol["x2_sup_window"])
    res.within("sup|x2| - (2+sqrt2) (upper window)", rep.x2_sup - target, tol["bound_slack"])
    lo, hi = rep.x1_box
    res.within("ln(alpha2) - min x1", lo - rep.x1_min, tol["bound_slack"])
    res.within("max x1 + ln(alpha2)", rep.x1_max - hi, tol["bound_slack"])
    res.holds("F violation recorded", len(rep.f_violations) > 0, len(rep.f_violations), 1)
    res.holds("x1 excursion above 0.7 recorded", rep.x1_max > 0.7, rep.x1_max, 0.7)
    res.holds("sup|x2| within each extremal's sharp bound", rep.hard_ok, rep.x2_sharp_mismatch, tol["bound_slack"])
    at = rep.x2_sup_at
    res.notes.append(
        f"sup|x2| = {rep.x2_sup:.12g} at t0 = {at['params']['t0']:.12g}, t = {at['t']:.12g}; "
        f"derived family bound 2 sqrt2 a b / omega^2 = {rep.x2_bound:.12g}"
    )
    return res


def check_alpha_bounds(tol) -> CheckResult:
    res = CheckResult(9, "alpha and frequency inequalities")
    rep = analysis.alpha_bounds_check()
    res.holds("alpha1 > alpha2 on grid", all(g > 0 for g in rep.alpha_gap), min(rep.alpha_gap), 0)
    res.within("alpha1(1e3) - alpha2", rep.alpha_gap[-1], tol["alpha_limit"])
    res.holds("sqrt(phi0^2+1) > sqrt2 on grid", all(g > 0 for g in rep.omega_gap), min(rep.omega_gap), 0)
    res.within("sqrt(phi0^2+1) - sqrt2 at phi0 = 1+1e-6", rep.omega_gap[0], tol["alpha_limit"])
    res.notes.append(f"alpha2 = 3 - 2 sqrt2 = {ALPHA_ISOTROPIC:.17g}")
    return res


def golden_cases():
    iso = GeodesicParams.make(ISOTROPIC)
    tl = GeodesicParams.make(TIMELIKE, math.sqrt(3.0))
    return [
        ("isotropic", iso, (math.pi * (SQRT2 - 2.0) / 4.0, math.log(2.0 - SQRT2), 1.0 + SQRT2, 0.0)),
        ("timelike phi0 = sqrt3", tl, (math.pi * (SQRT2 - math.sqrt(3.0) / 2.0), math.log(2.0 - math.sqrt(3.0)), 0.0, 0.0)),
    ]


def check_golden(tol) -> CheckResult:
    res = CheckResult(10, "golden spot values at t = pi/2")
    cases = golden_cases()
    t = math.pi / 2.0
    numeric = oracle.oracle_positions([c[1] for c in cases], np.array([0.0, t]))
    for i, (name, params, expected) in enumerate(cases):
        cf = np.array(closed_form_position(params, t))
        res.within(f"{name}: closed form", np.max(np.abs(cf - expected)), tol["golden_closed_form"])
        res.within(f"{name}: oracle", np.max(np.abs(numeric[i, 1] - expected)), tol["golden_oracle"])
    return res


def random_timelike(n: int = 20, seed: int = 1) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        phi0 = rng.uniform(1.05, 3.0)
        phi3 = rng.uniform(-0.9, 0.9) * max_abs_phi3(TIMELIKE, phi0)
        omega = GeodesicParams.make(TIMELIKE, phi0, phi3).omega
        out.append(GeodesicParams.make(TIMELIKE, phi0, phi3, rng.uniform(0.0, 2.0 * math.pi / omega)))
    return out


def check_pmp(tol) -> CheckResult:
    res = CheckResult(11, "minimum principle over the control region")
    worst_min = worst_arg = 0.0
    for params in random_timelike():
        for t in (0.0, 1.0, 2.0):
            rep = pmp_check(params, t, minimize=True)
            worst_min = max(worst_min, abs(rep.minimum - 1.0))
            worst_arg = max(worst_arg, rep.argmin_distance)
    res.within("max |min pairing - 1|", worst_min, tol["pmp_minimum"])
    res.within("max |argmin - u(t)| (hyperboloid)", worst_arg, tol["pmp_argmin"])
    return res


CHECKS = [
    check_oracle_agreement,
    check_conservation,
    check_drift_integral,
    check_no_closed_geodesic,
    check_curvature,
    check_horizon,
    check_chart_pullbacks,
    check_bounds,
    check_alpha_bounds,
    check_golden,
    check_pmp,
]


def run_check(number: int, overrides=None) -> CheckResult:
    return CHECKS[number - 1](resolve_tolerances(overrides))


def run_all(overrides=None) -> list:
    tol = resolve_tolerances(overrides)
    return [check(tol) for check in CHECKS]
