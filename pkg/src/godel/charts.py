"""The left-invariant Lorentz metric in Cartesian, cylindrical and Kundt charts.

Cartesian coordinates (x0, x1, x2, x3) are the group coordinates.  The
cylindrical chart (t, r, phi) covers the G0 factor and is singular on the
axis r = 0; the Kundt chart (t, x, y, z) with y > 0 exhibits the spatial
part as the upper half-plane of curvature -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotTimelikeError
from .extremals import unwrapped_atan_tan
from .group import SQRT2, AlgebraVector, GroupElement, left_translate_tangent

CARTESIAN = "cartesian"
CYLINDRICAL = "cylindrical"
KUNDT = "kundt"
CHARTS = (CARTESIAN, CYLINDRICAL, KUNDT)

CAUSAL_TOL = 1e-9

TIMELIKE = "timelike"
NULL = "null"
SPACELIKE = "spacelike"


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates in a tagged chart.

    cartesian: (x0, x1, x2[, x3]); cylindrical: (t, r, phi[, x3]);
    kundt: (t, x, y[, z]).
    """

    chart: str
    coords: tuple

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise DomainError(f"unknown chart {self.chart!r}; expected one of {CHARTS}")
        coords = tuple(float(c) for c in self.coords)
        if len(coords) not in (3, 4):
            raise DomainError("chart points have 3 or 4 coordinates")
        if not all(math.isfinite(c) for c in coords):
            raise DomainError("chart coordinates must be finite")
        if self.chart == KUNDT and coords[2] <= 0:
            raise DomainError(f"Kundt chart needs y > 0, got y = {coords[2]}")
        if self.chart == CYLINDRICAL and coords[1] < 0:
            raise DomainError(f"cylindrical chart needs r >= 0, got r = {coords[1]}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass
class MetricTensor:
    chart: str
    components: np.ndarray
    point: tuple
    a: float = 1.0

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def signature(self, tol: float = 1e-10) -> tuple:
        """Counts of (positive, negative, zero) eigenvalues."""
        ev = np.linalg.eigvalsh(self.components)
        return int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol))

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ self.components @ v)

    def inner(self, v, w) -> float:
        return float(np.asarray(v, dtype=float) @ self.components @ np.asarray(w, dtype=float))


@dataclass(frozen=True)
class CausalClass:
    tag: str
    value: float
    tol: float = CAUSAL_TOL


def _check_scale(a):
    if not a > 0:
        raise DomainError(f"metric scale a must be positive, got {a}")


def metric_cartesian(point, a: float = 1.0, dim: int = 4) -> MetricTensor:
    """Components of a^2 (dx0^2 + 2 e^{x1} dx0 dx2 + e^{2x1}/2 dx2^2 - dx1^2 - dx3^2)."""
    _check_scale(a)
    coords = tuple(float(c) for c in (point.coords if isinstance(point, ChartPoint) else point))
    x1 = coords[1]
    g = np.zeros((dim, dim))
    e = math.exp(x1)
    g[0, 0] = 1.0
    g[0, 2] = g[2, 0] = e
    g[2, 2] = e * e / 2.0
    g[1, 1] = -1.0
    if dim == 4:
        g[3, 3] = -1.0
    return MetricTensor(CARTESIAN, a * a * g, coords, a)


def metric_cylindrical(r: float, dim: int = 3) -> MetricTensor:
    """Components in the order (t, r, phi[, x3])."""
    if r < 0:
        raise DomainError(f"cylindrical radius must be non-negative, got r = {r}")
    s2 = math.sinh(r) ** 2
    g = np.zeros((dim, dim))
    g[0, 0] = 4.0
    g[1, 1] = -4.0
    g[2, 2] = 4.0 * s2 * (s2 - 1.0)
    g[0, 2] = g[2, 0] = 4.0 * SQRT2 * s2
    if dim == 4:
        g[3, 3] = -1.0
    return MetricTensor(CYLINDRICAL, g, (float(r),), 1.0)


def metric_kundt(point, dim: int | None = None) -> MetricTensor:
    """Components of (dt + sqrt2 dx / y)^2 - (dx^2 + dy^2) / y^2 [- dz^2]."""
    if not isinstance(point, ChartPoint):
        point = ChartPoint(KUNDT, tuple(point))
    if point.chart != KUNDT:
        raise DomainError("metric_kundt needs a Kundt chart point")
    y = point.coords[2]
    dim = dim or point.dim
    g = np.zeros((dim, dim))
    g[0, 0] = 1.0
    g[0, 1] = g[1, 0] = SQRT2 / y
    g[1, 1] = 1.0 / y**2
    g[2, 2] = -1.0 / y**2
    if dim == 4:
        g[3, 3] = -1.0
    return MetricTensor(KUNDT, g, point.coords, 1.0)


def metric_at(point: ChartPoint, a: float = 1.0) -> MetricTensor:
    if point.chart == CARTESIAN:
        return metric_cartesian(point, a, dim=point.dim)
    if point.chart == CYLINDRICAL:
        if a != 1.0:
            raise DomainError("the cylindrical chart is only tabulated for a = 1")
        return metric_cylindrical(point.coords[1], dim=point.dim)
    return metric_kundt(point)


def classify(value: float, tol: float = CAUSAL_TOL) -> CausalClass:
    if value > tol:
        return CausalClass(TIMELIKE, value, tol)
    if value < -tol:
        return CausalClass(SPACELIKE, value, tol)
    return CausalClass(NULL, value, tol)


def causal_class(v, p: ChartPoint | None = None, tol: float = CAUSAL_TOL) -> CausalClass:
    """Classify a Lie algebra vector (left-translated to ``p``) or a chart tangent."""
    if isinstance(v, AlgebraVector):
        if p is None:
            p = ChartPoint(CARTESIAN, (0.0, 0.0, 0.0, 0.0))
        if p.chart != CARTESIAN:
            raise DomainError("algebra vectors are translated in the Cartesian chart")
        g = GroupElement(*(p.coords + (0.0,) * (4 - p.dim)))
        tangent = left_translate_tangent(g, v)[: p.dim]
        return classify(metric_at(p).norm(tangent), tol)
    if p is None:
        raise DomainError("a coordinate tangent needs the point it is attached to")
    return classify(metric_at(p).norm(v), tol)


def cylindrical_to_cartesian(r: float, phi: float, t: float) -> tuple:
    """Map (r, phi, t) to (x0, x1, x2), with x0 on the principal branch."""
    if r < 0:
        raise DomainError(f"cylindrical radius must be non-negative, got r = {r}")
    c, s = math.cosh(2.0 * r), math.sinh(2.0 * r)
    ex1 = c + math.cos(phi) * s
    x1 = math.log(ex1)
    x2 = SQRT2 * math.sin(phi) * s / ex1
    w = unwrapped_atan_tan(math.exp(-2.0 * r), phi / 2.0) - phi / 2.0
    return (2.0 * t + 2.0 * SQRT2 * w, x1, x2)


def branch_offset(x0: float, t: float) -> float:
    """(x0 - 2t) / (2 sqrt2), required to lie strictly inside (-pi/2, pi/2)."""
    w = (x0 - 2.0 * t) / (2.0 * SQRT2)
    if not abs(w) < math.pi / 2.0:
        raise DomainError(f"|(x0 - 2t)/(2 sqrt2)| = {abs(w):.6g} is outside the principal strip")
    return w


def cartesian_to_cylindrical(x0: float, x1: float, x2: float) -> tuple:
    """Inverse of :func:`cylindrical_to_cartesian`; returns (r, phi, t).

    On the axis r = 0 the angle is undefined and 0 is returned.
    """
    ex1 = math.exp(x1)
    bb = x2 * ex1 / SQRT2  # sin(phi) sinh(2r)
    # sinh^2 r = ((e^{x1} - 1)^2 + B^2) / (4 e^{x1}), written to avoid cancellation
    r = math.asinh(math.sqrt((math.expm1(x1) ** 2 + bb * bb) / (4.0 * ex1)))
    phi = math.atan2(2.0 * ex1 * bb, math.expm1(2.0 * x1) - bb * bb) if r > 0 else 0.0
    w = unwrapped_atan_tan(math.exp(-2.0 * r), phi / 2.0) - phi / 2.0
    t = (x0 - 2.0 * SQRT2 * w) / 2.0
    branch_offset(x0, t)
    return (r, phi, t)


def kundt_to_cartesian(t: float, x: float, y: float, z: float = 0.0) -> tuple:
    if y <= 0:
        raise DomainError(f"Kundt chart needs y > 0, got y = {y}")
    return (t, -math.log(y), SQRT2 * x, z)


def cartesian_to_kundt(x0: float, x1: float, x2: float, x3: float = 0.0) -> tuple:
    return (x0, x2 / SQRT2, math.exp(-x1), x3)


def numerical_jacobian(f, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x), dtype=float)
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        dx = np.zeros_like(x)
        dx[j] = h
        jac[:, j] = (np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2.0 * h)
    return jac


@dataclass
class PullbackReport:
    chart: str
    residual: float
    n_points: int
    singular: list = field(default_factory=list)


def _chart_samples(chart, n, rng):
    if chart == KUNDT:
        return np.column_stack(
            [rng.uniform(-3, 3, n), rng.uniform(-3, 3, n), rng.uniform(0.2, 5.0, n), rng.uniform(-3, 3, n)]
        )
    if chart == CYLINDRICAL:
        return np.column_stack([rng.uniform(-3, 3, n), rng.uniform(0.1, 2.0, n), rng.uniform(-math.pi, math.pi, n)])
    return rng.uniform(-3, 3, (n, 4))


def pullback_residual(chart: str, points=None, n: int = 100, seed: int = 0, h: float = 1e-6) -> PullbackReport:
    """Max of |J^T g_cart J - g_chart| over sample points, J by central differences.

    Kundt points are (t, x, y, z); cylindrical points are (t, r, phi) and
    are compared on the G0 factor only.  Points where |det J| < 1e-10 are
    listed in ``singular``; they still contribute to the residual.
    """
    if chart not in CHARTS:
        raise DomainError(f"unknown chart {chart!r}")
    rng = np.random.default_rng(seed)
    pts = _chart_samples(chart, n, rng) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    if chart == CARTESIAN:
        # identity transform: J = I exactly
        return PullbackReport(chart, 0.0, len(pts))

    if chart == KUNDT:
        def transform(q):
            return kundt_to_cartesian(*q)

        def source(q):
            return metric_kundt(ChartPoint(KUNDT, tuple(q))).components

        dim = 4
    else:
        def transform(q):
            t, r, phi = q
            return cylindrical_to_cartesian(r, phi, t)

        def source(q):
            return metric_cylindrical(q[1]).components

        dim = 3

    worst = 0.0
    singular = []
    for q in pts:
        jac = numerical_jacobian(transform, q, h)
        image = transform(q)
        target = metric_cartesian(image, dim=dim).components
        diff = jac.T @ target @ jac - source(q)
        worst = max(worst, float(np.max(np.abs(diff))))
        if abs(np.linalg.det(jac)) < 1e-10:
            singular.append(tuple(float(v) for v in q))
    return PullbackReport(chart, worst, len(pts), singular)


def horizon_radius() -> float:
    """Radius where the rotation circles turn from spacelike to timelike: ln(1 + sqrt2)."""
    return math.log(1.0 + SQRT2)


def circle_class(r: float, tol: float = CAUSAL_TOL) -> CausalClass:
    return classify(metric_cylindrical(r).components[2, 2], tol)


@dataclass
class CircleWitness:
    """Closed coordinate circle t = const, r = const, sampled over phi in [0, 2 pi]."""

    r: float
    t: float
    phis: np.ndarray
    points: np.ndarray  # Cartesian (x0, x1, x2)
    g_phiphi: float
    tangent_norms: np.ndarray  # (d/dphi, d/dphi) evaluated in the Cartesian chart

    @property
    def closed(self) -> bool:
        return bool(np.allclose(self.points[0], self.points[-1], atol=1e-12))


def ctc_witness(r: float, n: int = 1000, t: float = 0.0, h: float = 1e-6) -> CircleWitness:
    """A closed timelike curve: the circle of radius ``r`` beyond the horizon."""
    if n < 2:
        raise ValueError("a closed circle needs at least 2 samples")
    cls = circle_class(r)
    if cls.tag != TIMELIKE:
        raise NotTimelikeError(
            f"circle of radius {r} is {cls.tag} (g_phiphi = {cls.value:.6g}); "
            f"closed timelike circles need r > ln(1 + sqrt2) = {horizon_radius():.17g}",
            cls,
        )
    phis = np.linspace(0.0, 2.0 * math.pi, n)
    points = np.array([cylindrical_to_cartesian(r, p, t) for p in phis])
    norms = np.empty(n)
    for i, p in enumerate(phis):
        tangent = (np.array(cylindrical_to_cartesian(r, p + h, t)) - np.array(cylindrical_to_cartesian(r, p - h, t))) / (2 * h)
        norms[i] = metric_cartesian(points[i], dim=3).norm(tangent)
    return CircleWitness(r, t, phis, points, cls.value, norms)


def _brioschi(E, F, G, u, v, h=1e-4):
    """Gaussian curvature of E du^2 + 2F du dv + G dv^2 by finite differences."""
    def d(f, i):
        return lambda a, b: (f(a + h, b) - f(a - h, b)) / (2 * h) if i == 0 else (f(a, b + h) - f(a, b - h)) / (2 * h)

    Eu, Ev, Fu, Fv, Gu, Gv = d(E, 0), d(E, 1), d(F, 0), d(F, 1), d(G, 0), d(G, 1)
    Evv, Guu, Fuv = d(Ev, 1)(u, v), d(Gu, 0)(u, v), d(Fu, 1)(u, v)
    e, f, g = E(u, v), F(u, v), G(u, v)
    m1 = np.array(
        [
            [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu(u, v), Fu(u, v) - 0.5 * Ev(u, v)],
            [Fv(u, v) - 0.5 * Gu(u, v), e, f],
            [0.5 * Gv(u, v), f, g],
        ]
    )
    m2 = np.array(
        [
            [0.0, 0.5 * Ev(u, v), 0.5 * Gu(u, v)],
            [0.5 * Ev(u, v), e, f],
            [0.5 * Gu(u, v), f, g],
        ]
    )
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (e * g - f * f) ** 2


def kundt_spatial_metric(x: float, y: float) -> np.ndarray:
    """Spatial metric h_ab = g_ta g_tb / g_tt - g_ab of the Kundt chart on (x, y)."""
    g = metric_kundt(ChartPoint(KUNDT, (0.0, x, y))).components
    gt = g[0, 1:]
    return np.outer(gt, gt) / g[0, 0] - g[1:, 1:]


def kundt_spatial_curvature(x: float, y: float, h: float = 1e-4) -> float:
    def comp(i, j):
        return lambda a, b: kundt_spatial_metric(a, b)[i, j]

    return float(_brioschi(comp(0, 0), comp(0, 1), comp(1, 1), x, y, h))
