"""Periods, drift, the closed-geodesic audit and bounding scans of extremals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .extremals import ALPHA_ISOTROPIC, ISOTROPIC, TIMELIKE, GeodesicParams, closed_form_array, closed_form_position
from .group import SQRT2

NO_CLOSURE = "no closed geodesic"

# box the x1/x2 projection is claimed to lie in, and the half-cone claimed for (x0, x3)
CLAIMED_X1_BOX = (-1.03, 0.7)
CLAIMED_X2_BOUND = 2.0 + SQRT2


def _require_oscillating(params: GeodesicParams):
    if params.is_line:
        raise DomainError("straight-line geodesics (b = 0) have no period")


def period(params: GeodesicParams) -> float:
    _require_oscillating(params)
    return 2.0 * math.pi / params.omega


def drift_per_period(params: GeodesicParams) -> float:
    """x0(t + P) - x0(t): the arc term gains 2 sqrt(2) pi while -phi0 t loses phi0 P."""
    _require_oscillating(params)
    return 2.0 * math.pi * (SQRT2 - params.phi0 / params.omega)


def _planar_gap(params, t):
    x = closed_form_array(params, t)
    return np.abs(x[..., 1]) + np.abs(x[..., 2])


@dataclass
class PeriodDriftReport:
    params: GeodesicParams
    period: float | None
    drift: float | None
    x3_slope: float
    verdict: str
    reason: str
    return_gap: float | None = None  # |x1| + |x2| at t = P
    drift_mismatch: float | None = None  # |x0(P) - drift|
    spurious_returns: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "params": self.params.to_record(),
            "period": self.period,
            "drift": self.drift,
            "x3_slope": self.x3_slope,
            "verdict": self.verdict,
            "reason": self.reason,
            "return_gap": self.return_gap,
            "drift_mismatch": self.drift_mismatch,
            "spurious_returns": self.spurious_returns,
        }


def simultaneous_returns(params: GeodesicParams, resolution: float = 1e-4, threshold: float = 1e-8) -> list:
    """Times in (0, P] where x1 and x2 both return to 0.

    Local minima of |x1| + |x2| on a grid of spacing ``resolution`` are
    refined by bounded scalar minimization; those below ``threshold`` are
    returned as (t, gap) pairs.
    """
    from scipy.optimize import minimize_scalar

    p = period(params)
    n = max(8, math.ceil(p / resolution))
    t = np.linspace(0.0, p, n + 1)
    gap = _planar_gap(params, t)
    interior = np.nonzero((gap[1:-1] <= gap[:-2]) & (gap[1:-1] <= gap[2:]))[0] + 1
    candidates = list(interior) + [n]
    found = []
    for i in candidates:
        lo, hi = t[max(i - 1, 0)], t[min(i + 1, n)]
        res = minimize_scalar(lambda s: float(_planar_gap(params, s)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        best_t, best = (res.x, res.fun) if res.fun < gap[i] else (t[i], gap[i])
        if best < threshold:
            found.append((float(best_t), float(best)))
    return found


def audit_params(params: GeodesicParams, resolution: float = 1e-4, threshold: float = 1e-8) -> PeriodDriftReport:
    """Explain why the extremal through the unit never closes."""
    if params.is_line:
        return PeriodDriftReport(
            params, None, None, params.phi3, NO_CLOSURE, f"line: x0 = {params.phi0:.17g} t is strictly increasing"
        )
    p = period(params)
    drift = drift_per_period(params)
    end = closed_form_position(params, p)
    returns = simultaneous_returns(params, resolution, threshold)
    # a return is legitimate when it sits at t = P up to the scan resolution
    spurious = [r for r in returns if abs(r[0] - p) > 10 * resolution]
    if spurious:
        verdict, reason = "closure candidate", f"planar return inside the period at t = {spurious[0][0]:.17g}"
    elif params.phi3 != 0.0:
        verdict, reason = NO_CLOSURE, f"x3 = {params.phi3:.17g} t is strictly monotone"
    elif drift > 0:
        verdict, reason = NO_CLOSURE, f"planar returns only at t = kP, where x0 has drifted by k * {drift:.17g}"
    else:
        verdict, reason = "closure candidate", "non-positive drift"
    return PeriodDriftReport(
        params,
        p,
        drift,
        params.phi3,
        verdict,
        reason,
        return_gap=abs(end.x1) + abs(end.x2),
        drift_mismatch=abs(end.x0 - drift),
        spurious_returns=spurious,
    )


def no_closed_geodesic_audit(params_grid, resolution: float = 1e-4, threshold: float = 1e-8) -> list:
    return [audit_params(p, resolution, threshold) for p in params_grid]


def cos_ratio_integral(alpha: float = ALPHA_ISOTROPIC, tol: float = 1e-10) -> float:
    """Adaptive quadrature of the integral of cos t / ((1 + alpha) + (1 - alpha) cos t) over [0, 2 pi].

    For alpha = 3 - 2 sqrt(2) the value is -pi; multiplied by -2 sqrt(alpha)
    it gives the isotropic drift 2 (sqrt(2) - 1) pi.
    """
    from scipy.integrate import quad

    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    value, err = quad(lambda t: math.cos(t) / ((1 + alpha) + (1 - alpha) * math.cos(t)), 0.0, 2.0 * math.pi, epsabs=tol * 1e-2, epsrel=tol, limit=200)
    return value


def period_shift_residual(params: GeodesicParams | None = None, times=None) -> float:
    """max over ``times`` of |x0(t + P) - x0(t) - drift|.

    Defaults to the isotropic phi3 = 0, t0 = 0 geodesic on 64 points of [0, 2 pi].
    """
    params = params or GeodesicParams.make(ISOTROPIC)
    times = np.linspace(0.0, 2.0 * math.pi, 64) if times is None else np.asarray(times, dtype=float)
    p, drift = period(params), drift_per_period(params)
    worst = 0.0
    for t in times:
        shift = closed_form_position(params, t + p).x0 - closed_form_position(params, t).x0
        worst = max(worst, abs(shift - drift))
    return worst


def timelike_alpha(phi0: float) -> float:
    """alpha of the timelike phi3 = 0 family, (a - b) / (a + b) with a = sqrt(2) phi0."""
    a, b = SQRT2 * phi0, math.sqrt(max(phi0 * phi0 - 1.0, 0.0))
    return (a - b) / (a + b)


@dataclass
class AlphaBoundsReport:
    phi0: list
    alpha: list
    alpha_gap: list  # alpha(phi0) - alpha_isotropic
    omega_gap: list  # sqrt(phi0^2 + 1) - sqrt(2)
    strict: bool

    def to_record(self) -> dict:
        return dict(self.__dict__)


def alpha_bounds_check(phi0_grid=(1.0 + 1e-6, 1.5, math.sqrt(3.0), 10.0, 1e3)) -> AlphaBoundsReport:
    """Timelike alpha and frequency stay strictly above their isotropic values.

    Both gaps close in a limit (alpha as phi0 -> infinity, frequency as
    phi0 -> 1), so neither inequality can be improved.
    """
    phi0 = [float(v) for v in phi0_grid]
    if any(v <= 1.0 for v in phi0):
        raise DomainError("phi0 grid must lie in (1, inf)")
    alpha = [timelike_alpha(v) for v in phi0]
    agap = [a - ALPHA_ISOTROPIC for a in alpha]
    ogap = [math.sqrt(v * v + 1.0) - SQRT2 for v in phi0]
    return AlphaBoundsReport(phi0, alpha, agap, ogap, all(g > 0 for g in agap) and all(g > 0 for g in ogap))


def x2_sharp_bound(params: GeodesicParams) -> float:
    """sup over t of |x2(t)| for these params, from the extremes of sin(tau) / N(tau)."""
    if params.is_line:
        return 0.0
    al = params.alpha
    tau0 = -params.omega * params.t0
    s0 = math.sin(tau0) / ((1 + al) + (1 - al) * math.cos(tau0))
    return params.beta * (0.5 / math.sqrt(al) + abs(s0))


def x2_family_bound(params: GeodesicParams) -> float:
    """sup over t and t0: 2 sqrt(2) a b / omega^2 (equals 4 for isotropic phi3 = 0)."""
    if params.is_line:
        return 0.0
    return 2.0 * SQRT2 * params.a_coef * params.b / params.omega**2


@dataclass
class BoundReport:
    grid: list
    samples: int
    x1_min: float
    x1_max: float
    x2_sup: float
    x2_sup_at: dict
    x1_box: tuple  # derived sharp box [ln alpha_iso, -ln alpha_iso]
    x2_bound: float  # largest derived sharp bound over the grid
    x2_sharp_mismatch: float  # max over params of |empirical sup - sharp sup|
    hard_ok: bool
    claimed_x2_bound: float = CLAIMED_X2_BOUND
    claimed_x2_ok: bool = True
    d_violations: list = field(default_factory=list)
    f_violations: list = field(default_factory=list)

    def to_record(self) -> dict:
        rec = dict(self.__dict__)
        rec["x1_box"] = list(self.x1_box)
        return rec


def _violation(params, t, x):
    return {"params": params.to_record(), "t": float(t), "x": [float(v) for v in x]}


def bounding_scan(params_grid, samples_per_period: int = 20000, tol: float = 1e-9) -> BoundReport:
    """Sample each extremal over two periods from t = 0 and collect extremes.

    Hard checks: x1 inside the derived box and |x2| below each params' sharp
    bound.  The claimed box D and half-cone F are only compared against.
    """
    from scipy.optimize import minimize_scalar

    grid = list(params_grid)
    if not grid:
        raise DomainError("bounding scan needs a non-empty grid")
    lo_box, hi_box = math.log(ALPHA_ISOTROPIC), -math.log(ALPHA_ISOTROPIC)
    x1_min, x1_max, x2_sup = math.inf, -math.inf, -math.inf
    x2_at = {}
    total = 0
    hard_ok = True
    mismatch = 0.0
    bound = 0.0
    d_viol, f_viol = [], []
    for params in grid:
        span = 2.0 * (period(params) if not params.is_line else 2.0 * math.pi)
        t = np.linspace(0.0, span, 2 * samples_per_period + 1)
        x = closed_form_array(params, t)
        total += len(t)
        ax2 = np.abs(x[:, 2])
        i = int(np.argmax(ax2))
        sup, t_sup = float(ax2[i]), float(t[i])
        if not params.is_line:
            h = t[1] - t[0]
            res = minimize_scalar(
                lambda s: -abs(float(closed_form_array(params, s)[2])),
                bounds=(max(t_sup - h, 0.0), min(t_sup + h, span)),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if -res.fun > sup:
                sup, t_sup = float(-res.fun), float(res.x)
        sharp = x2_sharp_bound(params)
        bound = max(bound, x2_family_bound(params))
        mismatch = max(mismatch, abs(sup - sharp))
        lo, hi = float(x[:, 1].min()), float(x[:, 1].max())
        hard_ok &= lo >= lo_box - tol and hi <= hi_box + tol and sup <= sharp + tol
        x1_min, x1_max = min(x1_min, lo), max(x1_max, hi)
        if sup > x2_sup:
            x2_sup = sup
            x2_at = {"params": params.to_record(), "t": t_sup}
        outside_d = (x[:, 1] < CLAIMED_X1_BOX[0]) | (x[:, 1] > CLAIMED_X1_BOX[1]) | (ax2 > CLAIMED_X2_BOUND + tol)
        if outside_d.any():
            j = int(np.argmax(np.where(outside_d, np.abs(x[:, 1]) + ax2, -np.inf)))
            d_viol.append(_violation(params, t[j], x[j]))
        outside_f = (x[:, 0] < -tol) | (np.abs(x[:, 3]) > x[:, 0] + tol)
        if outside_f.any():
            j = int(np.nonzero(outside_f)[0][0])
            f_viol.append(_violation(params, t[j], x[j]))
    return BoundReport(
        grid=[p.to_record() for p in grid],
        samples=total,
        x1_min=x1_min,
        x1_max=x1_max,
        x2_sup=x2_sup,
        x2_sup_at=x2_at,
        x1_box=(lo_box, hi_box),
        x2_bound=bound,
        x2_sharp_mismatch=mismatch,
        hard_ok=bool(hard_ok),
        claimed_x2_ok=x2_sup <= CLAIMED_X2_BOUND + tol,
        d_violations=d_viol,
        f_violations=f_viol,
    )


def isotropic_t0_sweep(n: int = 64) -> list:
    """Isotropic phi3 = 0 extremals with t0 on n equispaced points of [0, 2 pi)."""
    return [GeodesicParams.make(ISOTROPIC, 1.0, 0.0, 2.0 * math.pi * k / n) for k in range(n)]


def default_bound_grid() -> list:
    """Isotropic t0 sweep plus timelike cases that exhibit the F and x1 discrepancies."""
    grid = isotropic_t0_sweep(64)
    grid += [GeodesicParams.make(TIMELIKE, phi0, 0.0, 0.0) for phi0 in (1.25, 2.0, math.sqrt(3.0), 10.0)]
    grid += [GeodesicParams.make(TIMELIKE, 2.0, 0.5, 0.0), GeodesicParams.make(ISOTROPIC, 1.0, 1.0, 0.0)]
    return grid
