"""Leading-order quasilinear model at scri: damped Picard iteration for the
nonlinear coupling, scri-limit extraction, Bondi mass, and the mass-loss law.

The fixed point solves (leading transport system, mode-reduced)

    -2 (D_b - A0) (D_a - D_b) h + rho_I lam h = f_quad(h),

with the quadratic coupling lagged one iteration:  the (dx1)^2 row of f_quad
carries rho0 (v8^2 + v9^2)  (= rho0^{-1} |d1 (tracefree h)|^2 / 2 ... the
half comes from averaging the secant linearization), so the converged
solution satisfies  -4 gammaU d1 h11 - |d1 tracefree h|^2 / 2 = 0  on scri,
which integrates to the Bondi mass-loss law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .scri_solver import decay_fit, transport_solve
from .tensors import build_A, DIM

CY_SLOTS = (0, 1, 2, 3, 5, 6, 7)


@dataclass
class ScriLimits:
    """Leading terms at scri per core column, with remainder diagnostics."""

    a: np.ndarray
    h11_leading: np.ndarray
    p_leading: np.ndarray
    q_leading: np.ndarray
    remainder_exponents: dict
    cy_limit_max: float
    flags: tuple = ()


@dataclass
class MassRecord:
    u_ret: np.ndarray
    mass: np.ndarray
    news_flux: np.ndarray
    residual: np.ndarray


def aitken_limit(u1, u2, u3, s_delta):
    """Leading term and remainder exponent from three thinned slices
    (u1 farthest from scri, u3 closest; spacing s_delta in b).

    Exact for fields of the form L + c rho_I^mu.
    """
    d1 = u2 - u1
    d2 = u3 - u2
    denom = d2 - d1
    bad = np.abs(denom) < 1e-300
    limit = np.where(bad, u3, u3 - np.where(bad, 1.0, d2) ** 2 / np.where(bad, 1.0, denom))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(d1 / np.where(np.abs(d2) < 1e-300, np.nan, d2))
        mu = np.log(ratio) / s_delta
    return limit, mu


class _SliceStash:
    """Per-slice rows collected during a transport run (extended grid)."""

    def __init__(self, grid, ncomp=DIM):
        self.grid = grid
        n_ext = grid.a_ext.size
        self.h0 = np.zeros((grid.n_b, n_ext))
        self.v0 = np.zeros((grid.n_b, n_ext))
        self.w4 = np.zeros((grid.n_b, n_ext))   # rho0 * v4  (= d1 h11)
        self.w8 = np.zeros((grid.n_b, n_ext))
        self.w9 = np.zeros((grid.n_b, n_ext))

    def __call__(self, j, b, u_ext, v_ext):
        rho0 = np.exp(self.grid.a_ext)
        self.h0[j] = u_ext[:, 0]
        self.v0[j] = v_ext[:, 0]
        self.w4[j] = rho0 * v_ext[:, 4]
        self.w8[j] = rho0 * v_ext[:, 8]
        self.w9[j] = rho0 * v_ext[:, 9]


def _second_d1(w, grid):
    """d1^2 h from w = d1 h:  d1 w = rho0 (d_a - d_b) w on the stash."""
    rho0 = np.exp(grid.a_ext)[None, :]
    da = np.gradient(w, grid.delta, axis=1, edge_order=2)
    db = np.gradient(w, axis=0, edge_order=2) / (-grid.delta)
    return rho0 * (da - db)


def _quadratic_source(stash, grid, include_B=True):
    """Source array (n_b, n_ext, 10) for the next Picard sweep."""
    rho0 = np.exp(grid.a_ext)[None, :]
    f = np.zeros((grid.n_b, grid.a_ext.size, DIM))
    # (dx1)^2 row: + rho0 (v8^2 + v9^2) = + rho0^{-1} (d1 hp^2 + d1 hq^2)
    f[:, :, 4] = (stash.w8 ** 2 + stash.w9 ** 2) / rho0
    # tracefree rows: -2 d1 h_p v0 ... (A' coupling), quadratic as well
    f[:, :, 8] = -2.0 * stash.w8 * stash.v0
    f[:, :, 9] = -2.0 * stash.w9 * stash.v0
    if include_B:
        d11_h11 = _second_d1(stash.w4, grid)
        d11_hp = _second_d1(stash.w8, grid)
        d11_hq = _second_d1(stash.w9, grid)
        f[:, :, 4] -= 2.0 / rho0 * d11_h11 * stash.h0
        f[:, :, 8] -= 2.0 / rho0 * d11_hp * stash.h0
        f[:, :, 9] -= 2.0 / rho0 * d11_hq * stash.h0
    return f


@dataclass
class PicardResult:
    grid: object
    transport: object
    update_norms: list
    convergence_factors: list
    iterations: int
    stash: object = field(repr=False, default=None)


def picard_iterate(grid, pair, data_u, data_v, n_iter=8, quadratic=True,
                   include_B=True, probe_a=(-0.3,), tol=0.0):
    """Damped Picard iteration for the leading quasilinear system.

    Each sweep solves the linear transport system with the h = 0 endomorphism
    and the quadratic coupling of the previous iterate as a source; update
    norms must decay (divergence over three consecutive sweeps aborts).
    """
    if n_iter > 20:
        raise ValueError("n_iter capped at 20")
    A0 = build_A(pair)
    source = None
    prev_series = None
    update_norms = []
    result = None
    stash = None
    grow = 0
    for it in range(n_iter):
        stash = _SliceStash(grid)
        result = transport_solve(grid, A=A0, f=source, data_u=data_u,
                                 data_v=data_v, probe_a=probe_a,
                                 per_slice=stash, store_history=True)
        series = result.probe_series.copy()
        if prev_series is not None:
            update_norms.append(float(np.abs(series - prev_series).max()))
            if len(update_norms) >= 2 and update_norms[-1] > update_norms[-2]:
                grow += 1
                if grow >= 3:
                    raise SolverError("Picard iteration diverging: update norms "
                                      f"{update_norms[-3:]}")
            else:
                grow = 0
            if tol and update_norms[-1] < tol:
                prev_series = series
                break
        prev_series = series
        if quadratic:
            source = _quadratic_source(stash, grid, include_B=include_B)
        else:
            source = None
    factors = [update_norms[i + 1] / update_norms[i]
               for i in range(len(update_norms) - 1) if update_norms[i] > 0]
    return PicardResult(grid, result, update_norms, factors, it + 1, stash)


def extract_leading(grid, per_slice_u, stride=None, fit_window=None):
    """Leading terms at scri by Aitken extrapolation on three thinned slices.

    per_slice_u: (n_b, n_core, ncomp) history of u over the core columns (or
    a callable j -> slice).  Returns ScriLimits plus remainder fits.
    """
    n_b = grid.n_b
    if stride is None:
        stride = max(n_b // 12, 1)
    j3 = n_b - 1
    j2 = j3 - stride
    j1 = j3 - 2 * stride
    u1, u2, u3 = (np.asarray(per_slice_u[j]) for j in (j1, j2, j3))
    s_delta = stride * grid.delta
    limit, mu = aitken_limit(u1, u2, u3, s_delta)
    flags = []
    if not np.all(np.isfinite(limit)):
        flags.append("non-convergent")
        limit = np.where(np.isfinite(limit), limit, u3)

    scale = max(np.abs(per_slice_u[0]).max(), 1e-300)
    cy_max = float(np.abs(limit[:, CY_SLOTS]).max() / scale)

    if fit_window is None:
        bmin = grid.b[-1]
        fit_window = (math.exp(bmin + 0.5), math.exp(bmin + 0.5 * (grid.b[0] - bmin)))
    rem_fits = {}
    mid = limit.shape[0] // 2
    for name, slot in (("h11", 4), ("p", 8), ("q", 9), ("cy00", 0)):
        series = np.array([per_slice_u[j][mid, slot] for j in range(n_b)])
        rem = series - limit[mid, slot]
        try:
            rem_fits[name] = decay_fit(rem, grid.b, fit_window)
        except ValueError:
            rem_fits[name] = None
    return ScriLimits(grid.a_core, limit[:, 4], limit[:, 8], limit[:, 9],
                      rem_fits, cy_max, tuple(flags))


def bondi_mass(limits, mass, gammaU):
    """Mass series and mass-loss residual on the retarded-time grid.

    Mode-reduced normalization: sphere integrals are 4 pi times the l = 0
    amplitude and |X|^2 = 2 (Xp^2 + Xq^2), so

        M_B(u) = m + gammaU * h11_leading(u),
        flux(u) = (1/32 pi) int |du news|^2 = (dp/du^2 + dq/du^2) / 4.
    """
    a = limits.a
    u_ret = -np.exp(-a)
    M = mass + gammaU * limits.h11_leading
    dp = np.gradient(limits.p_leading, u_ret, edge_order=2)
    dq = np.gradient(limits.q_leading, u_ret, edge_order=2)
    flux = 0.25 * (dp ** 2 + dq ** 2)
    dM = np.gradient(M, u_ret, edge_order=2)
    return MassRecord(u_ret, M, flux, dM + flux)


def mass_loss_check(record):
    """Total mass change against the integrated news flux (trapezoid)."""
    dM_total = record.mass[-1] - record.mass[0]
    flux_total = float(np.trapz(record.news_flux, record.u_ret))
    denom = max(abs(dM_total), 1e-300)
    return dict(dM=dM_total, flux_integral=flux_total,
                relative_residual=abs(dM_total + flux_total) / denom)
