"""Levi-Civita connection, Ricci curvature and field equations of the Gödel metric.

The metric in group coordinates depends on x1 only, so Christoffel symbols
and their derivatives are assembled from the exact x1-derivatives of the
components.  A finite-difference route (:func:`christoffels_fd`) exists
only as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charts import metric_cartesian


def godel_metric_jet(point, a: float = 1.0):
    """Metric, inverse, first and second derivatives at ``point``.

    Derivative arrays are indexed dg[l, i, j] = d_l g_ij and
    d2g[m, l, i, j] = d_m d_l g_ij.
    """
    x1 = float(point[1])
    e = math.exp(x1)
    a2 = a * a
    g = metric_cartesian(point, a).components
    ginv = np.zeros((4, 4))
    ginv[0, 0] = -1.0 / a2
    ginv[0, 2] = ginv[2, 0] = 2.0 / (e * a2)
    ginv[2, 2] = -2.0 / (e * e * a2)
    ginv[1, 1] = ginv[3, 3] = -1.0 / a2
    dg = np.zeros((4, 4, 4))
    dg[1, 0, 2] = dg[1, 2, 0] = a2 * e
    dg[1, 2, 2] = a2 * e * e
    d2g = np.zeros((4, 4, 4, 4))
    d2g[1, 1, 0, 2] = d2g[1, 1, 2, 0] = a2 * e
    d2g[1, 1, 2, 2] = 2.0 * a2 * e * e
    return g, ginv, dg, d2g


def levi_civita(ginv, dg) -> np.ndarray:
    """Gamma[k, i, j] = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)."""
    lower = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg  # [l, i, j]
    return 0.5 * np.einsum("kl,lij->kij", ginv, lower)


def levi_civita_derivative(ginv, dg, d2g) -> np.ndarray:
    """dGamma[m, k, i, j] = d_m Gamma^k_ij."""
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    lower = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    dlower = d2g.transpose(0, 2, 1, 3) + d2g.transpose(0, 2, 3, 1) - d2g  # [m, l, i, j]
    return 0.5 * (np.einsum("mkl,lij->mkij", dginv, lower) + np.einsum("kl,mlij->mkij", ginv, dlower))


def ricci_from(gamma, dgamma) -> np.ndarray:
    """R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik."""
    term1 = np.einsum("kkij->ij", dgamma)
    term2 = np.einsum("jkik->ij", dgamma)
    term3 = np.einsum("kkl,lij->ij", gamma, gamma)
    term4 = np.einsum("kjl,lik->ij", gamma, gamma)
    return term1 - term2 + term3 - term4


def christoffels(point, a: float = 1.0) -> np.ndarray:
    """Christoffel symbols Gamma[k, i, j] in the Cartesian chart."""
    _, ginv, dg, _ = godel_metric_jet(point, a)
    return levi_civita(ginv, dg)


def christoffels_fd(metric_fn, point, h: float = 1e-6) -> np.ndarray:
    """Christoffel symbols from central differences of ``metric_fn(point)``."""
    x = np.asarray(point, dtype=float)
    n = x.size
    g = np.asarray(metric_fn(x))
    dg = np.empty((n, n, n))
    for l in range(n):
        dx = np.zeros(n)
        dx[l] = h
        dg[l] = (np.asarray(metric_fn(x + dx)) - np.asarray(metric_fn(x - dx))) / (2 * h)
    return levi_civita(np.linalg.inv(g), dg)


def matter_velocity(point, a: float = 1.0):
    """Unit 4-velocity of matter: vector e0 / a and its lowered covector."""
    e = math.exp(float(point[1]))
    u_up = np.array([1.0 / a, 0.0, 0.0, 0.0])
    u_low = a * np.array([1.0, 0.0, e, 0.0])
    return u_up, u_low


def ricci_and_scalar(point, a: float = 1.0):
    g, ginv, dg, d2g = godel_metric_jet(point, a)
    ric = ricci_from(levi_civita(ginv, dg), levi_civita_derivative(ginv, dg, d2g))
    return ric, float(np.einsum("ij,ij->", ginv, ric))


def einstein_residual(point, a: float = 1.0, lam: float | None = None) -> float:
    """max |R_ik - R g_ik / 2 - 8 pi kappa rho u_i u_k - Lambda g_ik|.

    8 pi kappa rho = 1/a^2; ``lam`` defaults to Lambda = -1/(2 a^2).
    """
    g = metric_cartesian(point, a).components
    ric, scalar = ricci_and_scalar(point, a)
    _, u_low = matter_velocity(point, a)
    if lam is None:
        lam = -1.0 / (2.0 * a * a)
    res = ric - 0.5 * scalar * g - np.outer(u_low, u_low) / (a * a) - lam * g
    return float(np.max(np.abs(res)))


def vorticity_scalar(g, gamma, u_up, u_low, du_low) -> float:
    """sqrt(omega_ij omega^ij / 2) for omega_ij = h_i^a h_j^b u_[a;b].

    ``du_low[j, i]`` holds d_j u_i.
    """
    ginv = np.linalg.inv(g)
    cov = du_low.T - np.einsum("kij,k->ij", gamma, u_low)  # u_{i;j}
    proj = np.eye(len(u_up)) - np.outer(u_low, u_up)  # h_i^a = delta - u_i u^a
    anti = 0.5 * (cov - cov.T)
    omega = proj @ anti @ proj.T
    omega_up = ginv @ omega @ ginv.T
    return math.sqrt(max(0.5 * float(np.einsum("ij,ij->", omega, omega_up)), 0.0))


def vorticity(point, a: float = 1.0) -> float:
    g, ginv, dg, _ = godel_metric_jet(point, a)
    u_up, u_low = matter_velocity(point, a)
    du = np.zeros((4, 4))
    du[1, 2] = a * math.exp(float(point[1]))
    return vorticity_scalar(g, levi_civita(ginv, dg), u_up, u_low, du)


@dataclass
class CurvatureReport:
    point: tuple
    a: float
    christoffels: np.ndarray
    ricci: np.ndarray
    scalar: float
    einstein_residual: float
    perfect_fluid_residual: float
    cosmological_constant: float
    density_term: float  # 8 pi kappa rho
    vorticity: float

    def to_record(self) -> dict:
        return {
            "point": list(self.point),
            "a": self.a,
            "scalar": self.scalar,
            "einstein_residual": self.einstein_residual,
            "perfect_fluid_residual": self.perfect_fluid_residual,
            "cosmological_constant": self.cosmological_constant,
            "eight_pi_kappa_rho": self.density_term,
            "vorticity": self.vorticity,
            "ricci": self.ricci.tolist(),
        }


def curvature_report(point, a: float = 1.0) -> CurvatureReport:
    point = tuple(float(v) for v in point)
    ric, scalar = ricci_and_scalar(point, a)
    _, u_low = matter_velocity(point, a)
    fluid = float(np.max(np.abs(ric - np.outer(u_low, u_low) / (a * a))))
    return CurvatureReport(
        point,
        a,
        christoffels(point, a),
        ric,
        scalar,
        einstein_residual(point, a),
        fluid,
        -scalar / 2.0,
        1.0 / (a * a),
        vorticity(point, a),
    )
