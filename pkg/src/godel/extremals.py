"""Pontryagin extremals of the Gödel group: timelike and isotropic geodesics.

Geodesics through the unit solve the first-order system

    gamma' = dl_gamma(u),   u = psi0 e0 - psi1 e1 - psi2 e2' - psi3 e3,

with the covector psi evolving by the coadjoint equation.  For this group
psi0 = phi0 and psi3 are constant, (psi1, psi2) = b (-sin theta, cos theta)
turns on a circle, and theta obeys theta' = b cos theta - sqrt(2) phi0.
Everything below is evaluated from the closed-form solution of that ODE.

Sign convention for the central direction: the control has e3-component
-psi3, so x3(t) = -psi3 t.  ``GeodesicParams.phi3`` is the x3 velocity,
i.e. phi3 = -psi3.  Only phi3**2 enters the planar motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .group import SQRT2, AlgebraVector, GroupElement

TIMELIKE = "timelike"
ISOTROPIC = "isotropic"
CLASSES = (TIMELIKE, ISOTROPIC)

# b below this routes to the straight-line formulas
LINE_THRESHOLD = 1e-12
NORMALIZATION_TOL = 1e-9
# b^2 within this many ulps of phi0^2 is roundoff, not oscillation
_B2_ROUNDOFF = 64.0 * np.finfo(float).eps
ALPHA_ISOTROPIC = 3.0 - 2.0 * SQRT2


def unwrapped_atan_tan(beta, s):
    """Continuous branch of arctan(beta * tan(s)).

    Equal to arctan(beta tan s) on (-pi/2, pi/2) and shifted by k*pi on each
    later branch, so it is strictly increasing in ``s``.  Works on scalars
    and numpy arrays.
    """
    if np.any(np.asarray(beta) <= 0):
        raise ValueError("beta must be positive")
    s = np.asarray(s, dtype=float)
    k = np.floor(s / math.pi + 0.5)
    r = s - k * math.pi
    # atan2 stays continuous when rounding pushes r just past +-pi/2
    out = np.arctan2(beta * np.sin(r), np.cos(r)) + k * math.pi
    return float(out) if out.ndim == 0 else out


def _normal_value(kind):
    # (u, u) along the curve
    return 1.0 if kind == TIMELIKE else 0.0


def _amplitude(b2: float, phi0: float) -> float:
    """sqrt(b2), with roundoff-sized b2 (from |phi3| at its bound) snapped to a line."""
    if b2 <= _B2_ROUNDOFF * max(1.0, phi0 * phi0):
        return 0.0
    return math.sqrt(b2)


def max_abs_phi3(kind: str, phi0: float) -> float:
    """Largest |phi3| for which the class admits a geodesic (b = 0 there)."""
    return math.sqrt(max(phi0 * phi0 - _normal_value(kind), 0.0))


@dataclass(frozen=True)
class GeodesicParams:
    """Causal class and the constants (phi0, phi3, b, t0) of an extremal.

    Use :meth:`make` to derive ``b`` from the normalization.  Derived
    quantities are properties and are never serialized.
    """

    kind: str
    phi0: float
    phi3: float
    b: float
    t0: float = 0.0

    def __post_init__(self):
        if self.kind not in CLASSES:
            raise ValidationError(f"class must be one of {CLASSES}, got {self.kind!r}")
        values = (self.phi0, self.phi3, self.b, self.t0)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("geodesic parameters must be finite")
        if self.kind == ISOTROPIC and abs(self.phi0 - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(
                f"isotropic geodesics are normalized to phi0 = 1, got phi0 = {self.phi0}",
                residual=self.phi0 - 1.0,
            )
        if self.kind == TIMELIKE and self.phi0 < 1.0:
            raise ValidationError(
                f"timelike geodesics need phi0 >= 1, got phi0 = {self.phi0}",
                residual=1.0 - self.phi0,
            )
        if self.b < 0:
            raise ValidationError(f"b must be non-negative, got {self.b}")
        bound = max_abs_phi3(self.kind, self.phi0)
        if abs(self.phi3) > bound * (1.0 + NORMALIZATION_TOL) + NORMALIZATION_TOL:
            name = "1" if self.kind == ISOTROPIC else "sqrt(phi0^2 - 1)"
            raise ValidationError(
                f"{self.kind} geodesics need |phi3| <= {name} = {bound:.17g}, "
                f"got |phi3| = {abs(self.phi3):.17g}",
                residual=abs(self.phi3) - bound,
            )
        residual = self.phi0**2 - self.b**2 - self.phi3**2 - _normal_value(self.kind)
        if abs(residual) > NORMALIZATION_TOL * max(1.0, self.phi0**2):
            raise ValidationError(
                f"normalization violated: phi0^2 - b^2 - phi3^2 - (u,u) = {residual:.3e}",
                residual=residual,
            )

    @classmethod
    def make(cls, kind, phi0=1.0, phi3=0.0, t0=0.0):
        phi0, phi3 = float(phi0), float(phi3)
        if kind == TIMELIKE and phi0 < 1.0:
            raise ValidationError(f"timelike geodesics need phi0 >= 1, got phi0 = {phi0}")
        b2 = phi0 * phi0 - phi3 * phi3 - _normal_value(kind)
        if b2 < -NORMALIZATION_TOL * max(1.0, phi0 * phi0):
            name = "1" if kind == ISOTROPIC else "sqrt(phi0^2 - 1)"
            raise ValidationError(
                f"{kind} geodesics need |phi3| <= {name} = {max_abs_phi3(kind, phi0):.17g}, "
                f"got |phi3| = {abs(phi3):.17g}",
                residual=-b2,
            )
        return cls(kind, phi0, phi3, _amplitude(b2, phi0), float(t0))

    @classmethod
    def from_record(cls, record: dict) -> "GeodesicParams":
        return cls(
            record["class"],
            float(record["phi0"]),
            float(record["phi3"]),
            float(record["b"]),
            float(record.get("t0", 0.0)),
        )

    def to_record(self) -> dict:
        return {"class": self.kind, "phi0": self.phi0, "phi3": self.phi3, "b": self.b, "t0": self.t0}

    @property
    def is_line(self) -> bool:
        return self.b < LINE_THRESHOLD

    @property
    def a_coef(self) -> float:
        return SQRT2 * self.phi0

    @property
    def alpha(self) -> float:
        a = self.a_coef
        return (a - self.b) / (a + self.b)

    @property
    def omega(self) -> float:
        return math.sqrt(self.phi0**2 + _normal_value(self.kind) + self.phi3**2)

    @property
    def beta(self) -> float:
        """Amplitude of x2: (sqrt2 b / omega) * N(-omega t0)."""
        al = self.alpha
        return SQRT2 * self.b / self.omega * ((1 + al) + (1 - al) * math.cos(self.omega * self.t0))


def params_from_initial(kind: str, psi, tol: float = NORMALIZATION_TOL) -> GeodesicParams:
    """Geodesic constants from the initial covector (psi0, psi1, psi2, psi3)."""
    psi0, psi1, psi2, psi3 = (float(v) for v in psi)
    if kind not in CLASSES:
        raise ValidationError(f"class must be one of {CLASSES}, got {kind!r}")
    if kind == ISOTROPIC:
        residual = max(abs(psi0 - 1.0), abs(psi1**2 + psi2**2 + psi3**2 - 1.0))
        if residual > tol:
            raise ValidationError(
                f"isotropic covector must have psi0 = 1 and psi1^2 + psi2^2 + psi3^2 = 1 "
                f"(residual {residual:.3e})",
                residual=residual,
            )
    else:
        residual = psi0**2 - psi1**2 - psi2**2 - psi3**2 - 1.0
        if abs(residual) > tol * max(1.0, psi0**2) or psi0 < 1.0 - tol:
            raise ValidationError(
                f"timelike covector must have psi0 >= 1 and (u,u) = 1 (residual {residual:.3e})",
                residual=residual,
            )
    b = math.hypot(psi1, psi2)
    phi0 = 1.0 if kind == ISOTROPIC else psi0
    if b < LINE_THRESHOLD:
        return GeodesicParams(kind, phi0, -psi3, 0.0, 0.0)
    b = _amplitude(phi0**2 - psi3**2 - _normal_value(kind), phi0)
    if b == 0.0:
        return GeodesicParams(kind, phi0, -psi3, 0.0, 0.0)
    theta0 = math.atan2(-psi1, psi2)
    if theta0 <= -math.pi:
        theta0 += 2.0 * math.pi
    params = GeodesicParams(kind, phi0, -psi3, b, 0.0)
    if theta0 >= math.pi:
        t0 = math.pi / params.omega
    else:
        t0 = 2.0 / params.omega * math.atan(math.tan(theta0 / 2.0) / math.sqrt(params.alpha))
    return GeodesicParams(kind, phi0, -psi3, b, t0)


def adjoint_rhs(psi, phi0: float) -> np.ndarray:
    """Right-hand side of the reduced coadjoint system for this group."""
    psi0, psi1, psi2, psi3 = psi
    k = SQRT2 * phi0 - psi2
    return np.array([0.0, psi2 * k, -psi1 * k, 0.0])


def control(psi) -> AlgebraVector:
    """Control u = psi0 e0 - psi1 e1 - psi2 e2' - psi3 e3 (orthonormal frame)."""
    psi0, psi1, psi2, psi3 = (float(v) for v in psi)
    if psi0 <= 0:
        raise ValidationError(f"future-directed extremals need psi0 > 0, got {psi0}")
    return AlgebraVector.orthonormal(psi0, -psi1, -psi2, -psi3)


def theta(params: GeodesicParams, t):
    """Angle of the (psi1, psi2) circle; continuous, decreasing, zero at t0."""
    if params.is_line:
        raise ValueError("theta is undefined for b = 0 (straight-line geodesic)")
    sigma = params.omega * (np.asarray(t, dtype=float) - params.t0) / 2.0
    return -2.0 * unwrapped_atan_tan(math.sqrt(params.alpha), sigma)


def psi_at(params: GeodesicParams, t) -> np.ndarray:
    """Covector psi(t) along the extremal; shape (4,) or (len(t), 4)."""
    t_arr = np.asarray(t, dtype=float)
    out = np.empty(t_arr.shape + (4,))
    out[..., 0] = params.phi0
    out[..., 3] = -params.phi3
    if params.is_line:
        out[..., 1] = 0.0
        out[..., 2] = 0.0
    else:
        th = theta(params, t_arr)
        out[..., 1] = -params.b * np.sin(th)
        out[..., 2] = params.b * np.cos(th)
    return out


def control_at(params: GeodesicParams, t) -> AlgebraVector:
    return control(psi_at(params, float(t)))


def _n(alpha, tau):
    return (1.0 + alpha) + (1.0 - alpha) * np.cos(tau)


def closed_form_array(params: GeodesicParams, t) -> np.ndarray:
    """Vectorized closed form; returns array of shape t.shape + (4,)."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (4,))
    out[..., 3] = params.phi3 * t
    if params.is_line:
        out[..., 0] = params.phi0 * t
        out[..., 1] = 0.0
        out[..., 2] = 0.0
        return out
    al, om = params.alpha, params.omega
    tau = om * (t - params.t0)
    tau0 = -om * params.t0
    n_tau, n_0 = _n(al, tau), _n(al, tau0)
    out[..., 1] = np.log(n_tau) - np.log(n_0)
    out[..., 2] = params.beta * (np.sin(tau) / n_tau - math.sin(tau0) / n_0)
    sq = math.sqrt(al)
    arc = unwrapped_atan_tan(sq, tau / 2.0) - unwrapped_atan_tan(sq, tau0 / 2.0)
    out[..., 0] = -params.phi0 * t + 2.0 * SQRT2 * arc
    return out


def closed_form_position(params: GeodesicParams, t: float) -> GroupElement:
    """Point gamma(t) of the extremal starting at the unit."""
    x = closed_form_array(params, float(t))
    if not params.is_line:
        # compensated sum for the x0 combination of large, nearly cancelling terms
        al, om = params.alpha, params.omega
        sq = math.sqrt(al)
        terms = (
            -params.phi0 * t,
            2.0 * SQRT2 * unwrapped_atan_tan(sq, om * (t - params.t0) / 2.0),
            -2.0 * SQRT2 * unwrapped_atan_tan(sq, -om * params.t0 / 2.0),
        )
        x[0] = math.fsum(terms)
    return GroupElement(*(float(v) for v in x))


def sample_curve(params: GeodesicParams, times) -> "SampledCurve":
    times = np.asarray(times, dtype=float)
    points = closed_form_array(params, times)
    return SampledCurve(times, points, chart="cartesian", params=params)


@dataclass
class SampledCurve:
    """Sampled points of a curve; ``points`` rows are chart coordinates."""

    times: np.ndarray
    points: np.ndarray
    chart: str = "cartesian"
    params: GeodesicParams | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        for t, row in zip(self.times, self.points):
            yield float(t), GroupElement(*(float(v) for v in row))


@dataclass
class PMPReport:
    """Residuals of the minimum-principle conditions at one instant."""

    t: float
    pairing: float
    norm: float
    minimum: float | None
    argmin_distance: float | None
    adjoint_residual: float


def hyperboloid_point(p) -> np.ndarray:
    """Unit future hyperboloid point with spatial part ``p``: (sqrt(1+|p|^2), p)."""
    p = np.asarray(p, dtype=float)
    return np.concatenate(([math.sqrt(1.0 + float(p @ p))], p))


def minimize_pairing(psi, grid: int = 9, span: float = 4.0):
    """Numerically minimize psi(u) over U = {u0 > 0, (u,u) >= 1}.

    For psi in the open future cone psi(lambda u) grows with lambda >= 1, so
    the minimum sits on the hyperboloid (u,u) = 1, parameterized globally by
    its spatial part.  A coarse grid seeds a BFGS refinement.
    Returns (minimum value, minimizing spatial part).
    """
    from scipy.optimize import minimize

    psi = np.asarray(psi, dtype=float)
    dim = len(psi) - 1

    def pairing(p):
        return float(psi @ hyperboloid_point(p))

    def grad(p):
        u0 = math.sqrt(1.0 + float(p @ p))
        return psi[0] * p / u0 + psi[1:]

    axis = np.linspace(-span, span, grid)
    mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    values = psi[0] * np.sqrt(1.0 + np.sum(mesh**2, axis=1)) + mesh @ psi[1:]
    start = mesh[int(np.argmin(values))]
    res = minimize(pairing, start, jac=grad, method="BFGS", options={"gtol": 1e-12, "maxiter": 500})
    return float(res.fun), np.asarray(res.x)


def pmp_check(params: GeodesicParams, t: float, minimize: bool | None = None) -> PMPReport:
    """Check the minimum-principle relations at time ``t``.

    (i) pairing psi(u) equals (u, u); (ii) for timelike extremals, the
    numerical minimum of the pairing over U is attained at u(t); (iii) the
    coadjoint relation psi'(v) = psi([u, v]) on the basis.
    """
    from .group import structure_constants

    psi = psi_at(params, t)
    u = control(psi).array
    pairing = float(psi @ u)
    norm = float(u[0] ** 2 - u[1] ** 2 - u[2] ** 2 - u[3] ** 2)
    c = structure_constants()
    predicted = np.einsum("i,k,kij->j", u, psi, c)
    actual = adjoint_rhs(psi, params.phi0)
    adjoint_residual = float(np.max(np.abs(predicted - actual)))
    if minimize is None:
        minimize = params.kind == TIMELIKE
    minimum = distance = None
    if minimize:
        minimum, p = minimize_pairing(psi)
        distance = float(np.max(np.abs(p - u[1:])))
    return PMPReport(float(t), pairing, norm, minimum, distance, adjoint_residual)
