"""Independent numerical integrator for left-invariant Pontryagin extremals.

Works on any matrix Lie algebra given by structure constants in an
orthonormal basis (e0, ..., en) and a rank r <= n.  The covector obeys

    psi_j' = sum_k (C^k_{0j} psi0 psi_k - sum_{i=1..r} C^k_{ij} psi_i psi_k),

the control is u = psi0 e0 - sum_{i=1..r} psi_i e_i, and the group point is
integrated as the matrix ODE gamma' = gamma U(t) from the identity.  Nothing
here uses the closed-form geodesics; it exists to check them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GodelError


@dataclass
class LieAlgebraSpec:
    dim: int
    rank: int
    constants: np.ndarray  # C[k, i, j]: [e_i, e_j] = sum_k C[k, i, j] e_k
    basis: np.ndarray | None = None  # (dim, m, m) matrix realization
    readout: Callable | None = None  # group matrix -> coordinates

    def __post_init__(self):
        self.constants = np.asarray(self.constants, dtype=float)
        if self.constants.shape != (self.dim,) * 3:
            raise GodelError(f"structure constants must have shape {(self.dim,) * 3}")
        if not 0 <= self.rank <= self.dim - 1:
            raise GodelError(f"rank must lie in [0, {self.dim - 1}]")
        asym = np.max(np.abs(self.constants + self.constants.transpose(0, 2, 1)), initial=0.0)
        if asym > 1e-12:
            raise GodelError(f"structure constants are not antisymmetric (residual {asym:.3e})")
        jac = self.jacobi_residual()
        if jac > 1e-12:
            raise GodelError(f"Jacobi identity fails (residual {jac:.3e})")
        if self.basis is not None:
            self.basis = np.asarray(self.basis, dtype=float)
            if self.basis.shape[0] != self.dim:
                raise GodelError("basis must have one matrix per dimension")

    def jacobi_residual(self) -> float:
        c = self.constants
        # [[e_i, e_j], e_k] = sum_l C^l_ij C^m_lk e_m, summed cyclically
        t = np.einsum("lij,mlk->mijk", c, c)
        total = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(total), initial=0.0))

    @classmethod
    def from_matrices(cls, basis, rank: int, readout=None) -> "LieAlgebraSpec":
        """Structure constants from commutators of a matrix basis (least squares)."""
        basis = np.asarray(basis, dtype=float)
        d = basis.shape[0]
        flat = basis.reshape(d, -1).T
        c = np.zeros((d, d, d))
        for i in range(d):
            for j in range(d):
                comm = basis[i] @ basis[j] - basis[j] @ basis[i]
                coef, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
                if np.max(np.abs(flat @ coef - comm.ravel()), initial=0.0) > 1e-12:
                    raise GodelError("basis matrices do not span a Lie algebra")
                c[:, i, j] = coef
        c[np.abs(c) < 1e-15] = 0.0
        return cls(d, rank, c, basis, readout)

    @classmethod
    def from_record(cls, record) -> "LieAlgebraSpec":
        """Parse {"dimension", "rank", "constants": [[k, i, j, value], ...], "basis"?}.

        Only the listed entries are set; antisymmetric partners must be listed
        too.  ``record`` may be a dict or its JSON text.
        """
        if isinstance(record, str):
            record = json.loads(record)
        d = int(record["dimension"])
        c = np.zeros((d, d, d))
        for k, i, j, value in record.get("constants", []):
            c[int(k), int(i), int(j)] = float(value)
        basis = record.get("basis")
        return cls(d, int(record["rank"]), c, None if basis is None else np.asarray(basis, dtype=float))

    def to_record(self) -> dict:
        entries = [[int(k), int(i), int(j), float(self.constants[k, i, j])] for k, i, j in zip(*np.nonzero(self.constants))]
        rec = {"dimension": self.dim, "rank": self.rank, "constants": entries}
        if self.basis is not None:
            rec["basis"] = self.basis.tolist()
        return rec

    def control_weights(self) -> np.ndarray:
        """Diagonal map psi -> u: +1 on e0, -1 on e1..er, 0 beyond."""
        w = np.zeros(self.dim)
        w[0] = 1.0
        w[1 : self.rank + 1] = -1.0
        return w


def godel_spec(dim: int = 4) -> LieAlgebraSpec:
    """Gödel algebra in the orthonormal basis (e0, e1, e2'[, e3]) from matrices.

    dim 3 uses the 4x4 affine model of G0; dim 4 uses a 5x5 affine model
    with x3 as an extra translation row.
    """
    s2 = math.sqrt(2.0)
    if dim == 3:
        m = 4
        row_x2, row_x1, row_x0 = 0, 1, 2
    elif dim == 4:
        m = 5
        row_x2, row_x1, row_x0, row_x3 = 0, 1, 2, 3
    else:
        raise GodelError("the Gödel algebra has dimension 3 (G0) or 4 (G)")
    last = m - 1

    def unit(*entries):
        e = np.zeros((m, m))
        for (r, c), v in entries:
            e[r, c] = v
        return e

    e0 = unit(((row_x0, last), 1.0))
    e1 = unit(((0, 0), -1.0), ((row_x1, last), 1.0))
    e2 = unit(((row_x2, last), 1.0))
    mats = [e0, e1, s2 * (e0 - e2)]
    if dim == 4:
        mats.append(unit(((row_x3, last), 1.0)))

    def readout(g):
        coords = [g[..., row_x0, last], g[..., row_x1, last], g[..., row_x2, last]]
        coords.append(g[..., row_x3, last] if dim == 4 else np.zeros_like(coords[0]))
        return np.stack(coords, axis=-1)

    return LieAlgebraSpec.from_matrices(np.array(mats), rank=dim - 1, readout=readout)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4-fixed"
    h: float = 1e-3
    tol: float = 1e-10
    max_span: float = 1e4

    def __post_init__(self):
        if self.method not in ("rk4-fixed", "rk45-adaptive"):
            raise GodelError(f"unknown integration method {self.method!r}")
        if not self.h > 0 or not self.tol > 0:
            raise GodelError("step and tolerance must be positive")


@dataclass
class TrajectorySample:
    t: float
    coords: np.ndarray
    psi: np.ndarray
    u: np.ndarray
    monitors: dict = field(default_factory=dict)


def generic_adjoint_rhs(spec: LieAlgebraSpec, psi) -> np.ndarray:
    """Covector rate; ``psi`` may carry leading batch axes."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape[-1] != spec.dim:
        raise GodelError(f"covector has {psi.shape[-1]} components, algebra has {spec.dim}")
    u = psi * spec.control_weights()
    return np.einsum("...i,...k,kij->...j", u, psi, spec.constants)


def _rhs(spec, psi, gamma):
    u = psi * spec.control_weights()
    dpsi = np.einsum("bi,bk,kij->bj", u, psi, spec.constants)
    dgamma = gamma @ np.einsum("bi,imn->bmn", u, spec.basis)
    return dpsi, dgamma


def _rk4_segment(spec, psi, gamma, dt, steps):
    h = dt / steps
    for _ in range(steps):
        k1p, k1g = _rhs(spec, psi, gamma)
        k2p, k2g = _rhs(spec, psi + 0.5 * h * k1p, gamma + 0.5 * h * k1g)
        k3p, k3g = _rhs(spec, psi + 0.5 * h * k2p, gamma + 0.5 * h * k2g)
        k4p, k4g = _rhs(spec, psi + h * k3p, gamma + h * k3g)
        psi = psi + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        gamma = gamma + h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
    return psi, gamma


def _adaptive_segment(spec, psi, gamma, t_targets, tol):
    from scipy.integrate import solve_ivp

    b, d = psi.shape
    m = gamma.shape[-1]

    def f(_, y):
        p = y[: b * d].reshape(b, d)
        g = y[b * d :].reshape(b, m, m)
        dp, dg = _rhs(spec, p, g)
        return np.concatenate([dp.ravel(), dg.ravel()])

    y0 = np.concatenate([psi.ravel(), gamma.ravel()])
    sol = solve_ivp(f, (0.0, t_targets[-1]), y0, method="DOP853", t_eval=t_targets, rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise GodelError(f"adaptive integration failed: {sol.message}")
    ys = sol.y.T
    return ys[:, : b * d].reshape(-1, b, d), ys[:, b * d :].reshape(-1, b, m, m)


def integrate_batch(spec: LieAlgebraSpec, psi_inits, times, config: IntegratorConfig = IntegratorConfig()):
    """Integrate several extremals from the identity, reporting at ``times``.

    Returns (psi, gamma) with shapes (B, T, dim) and (B, T, m, m).  Negative
    times are reached by integrating backwards from 0; each gap between
    consecutive report times is split into ceil(gap / h) equal RK4 steps.
    """
    if spec.basis is None:
        raise GodelError("integration needs a matrix realization of the basis")
    psi0 = np.atleast_2d(np.asarray(psi_inits, dtype=float))
    times = np.asarray(times, dtype=float)
    if np.any(np.abs(times) > config.max_span):
        raise GodelError(f"requested time exceeds max span {config.max_span}")
    if np.any(psi0[:, 0] <= 0):
        raise GodelError("future-directed extremals need psi0 > 0")
    b = psi0.shape[0]
    m = spec.basis.shape[-1]
    out_psi = np.empty((b, len(times), spec.dim))
    out_gam = np.empty((b, len(times), m, m))
    for sign in (1.0, -1.0):
        idx = np.nonzero(times >= 0)[0] if sign > 0 else np.nonzero(times < 0)[0]
        if len(idx) == 0:
            continue
        order = idx[np.argsort(sign * times[idx], kind="stable")]
        targets = sign * times[order]
        psi, gam = psi0.copy(), np.broadcast_to(np.eye(m), (b, m, m)).copy()
        if config.method == "rk45-adaptive":
            # time reversal of both equations: integrate the negated field forward
            flipped = LieAlgebraSpec(spec.dim, spec.rank, sign * spec.constants, sign * spec.basis)
            ps, gs = _adaptive_segment(flipped, psi, gam, targets, config.tol) if targets[-1] > 0 else (None, None)
            for pos, j in enumerate(order):
                if targets[pos] == 0:
                    out_psi[:, j], out_gam[:, j] = psi, gam
                else:
                    out_psi[:, j], out_gam[:, j] = ps[pos], gs[pos]
            continue
        t_prev = 0.0
        for pos, j in enumerate(order):
            gap = targets[pos] - t_prev
            if gap > 0:
                steps = max(1, math.ceil(gap / config.h - 1e-9))
                psi, gam = _rk4_segment(spec, psi, gam, sign * gap, steps)
                t_prev = targets[pos]
            out_psi[:, j], out_gam[:, j] = psi, gam
    return out_psi, out_gam


def _monitors(spec, psi, u):
    r = spec.rank
    uu = u[..., 0] ** 2 - np.sum(u[..., 1 : r + 1] ** 2, axis=-1)
    mon = {"psi0": psi[..., 0], "uu": uu, "pairing": np.sum(psi * u, axis=-1)}
    if spec.dim >= 3:
        mon["psi12"] = psi[..., 1] ** 2 + psi[..., 2] ** 2
    if spec.dim >= 4:
        mon["psi3"] = psi[..., 3]
    return mon


def integrate(spec: LieAlgebraSpec, psi_init, T: float, config: IntegratorConfig = IntegratorConfig(), times=None):
    """Samples of one extremal on [0, T] (or [T, 0] for T < 0).

    Without ``times`` the samples sit on the step grid.
    """
    if times is None:
        n = max(1, math.ceil(abs(T) / config.h - 1e-9))
        times = np.linspace(0.0, T, n + 1)
    times = np.asarray(times, dtype=float)
    psi, gam = integrate_batch(spec, [psi_init], times, config)
    psi, gam = psi[0], gam[0]
    u = psi * spec.control_weights()
    coords = spec.readout(gam) if spec.readout else gam.reshape(len(times), -1)
    mon = _monitors(spec, psi, u)
    return [
        TrajectorySample(float(t), coords[i], psi[i], u[i], {k: float(v[i]) for k, v in mon.items()})
        for i, t in enumerate(times)
    ]


def drift_rates(samples) -> dict:
    """Max |monitor(t) - monitor(0)| / |t - t_first| over the trajectory, per monitor."""
    first = samples[0]
    rates = {k: 0.0 for k in first.monitors}
    for s in samples[1:]:
        dt = abs(s.t - first.t)
        if dt == 0:
            continue
        for k in rates:
            rates[k] = max(rates[k], abs(s.monitors[k] - first.monitors[k]) / dt)
    return rates


def span_times(span, h: float) -> np.ndarray:
    """Grid on ``span`` with spacing at most h, containing 0 and both ends."""
    lo, hi = float(span[0]), float(span[1])
    parts = []
    if lo < 0:
        n = max(1, math.ceil(-lo / h - 1e-9))
        parts.append(np.linspace(lo, 0.0, n + 1)[:-1])
    if hi > 0:
        n = max(1, math.ceil(hi / h - 1e-9))
        parts.append(np.linspace(0.0, hi, n + 1))
    else:
        parts.append(np.array([0.0]))
    return np.concatenate(parts)


def oracle_positions(params_list, times, config: IntegratorConfig = IntegratorConfig(), spec=None):
    """Numerically integrated (x0, x1, x2, x3) for each params; shape (B, T, 4)."""
    from .extremals import psi_at

    spec = spec or godel_spec(4)
    psi_inits = np.array([psi_at(p, 0.0) for p in params_list])
    _, gam = integrate_batch(spec, psi_inits, times, config)
    return spec.readout(gam)


def compare_many(params_list, config: IntegratorConfig = IntegratorConfig(), span=(-2 * math.pi, 2 * math.pi)):
    """Max |closed form - oracle| per params, over a step grid on ``span``."""
    from .extremals import closed_form_array

    times = span_times(span, config.h)
    numeric = oracle_positions(params_list, times, config)
    return np.array([np.max(np.abs(closed_form_array(p, times) - numeric[i])) for i, p in enumerate(params_list)])


def compare_to_closed_form(params, config: IntegratorConfig = IntegratorConfig(), span=(-2 * math.pi, 2 * math.pi)) -> float:
    return float(compare_many([params], config, span)[0])


@dataclass
class ScanResult:
    min: float
    max: float
    argmin: object
    argmax: object
    count: int


def extremum_scan(func, grid) -> ScanResult:
    """Empirical min and max of ``func`` over ``grid``, first occurrence wins ties."""
    best_lo = best_hi = None
    arg_lo = arg_hi = None
    count = 0
    for point in grid:
        value = float(func(point))
        count += 1
        if best_lo is None or value < best_lo:
            best_lo, arg_lo = value, point
        if best_hi is None or value > best_hi:
            best_hi, arg_hi = value, point
    if count == 0:
        raise ValueError("extremum_scan needs a non-empty grid")
    return ScanResult(best_lo, best_hi, arg_lo, arg_hi, count)
