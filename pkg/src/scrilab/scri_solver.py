"""Characteristic transport and damped-wave solvers near null infinity.

Everything is solved in logarithmic coordinates a = log rho0, b = log rho_I
on a unit-ratio lattice (da = db), marching from the spacelike data slice at
b_max down toward scri (b -> -inf).  The first-order reformulation tracks

    u   and   v = (rho0 d_rho0 - rho_I d_rho_I) u = (d_a - d_b) u,

with v obeying a regular-singular ODE in b per a-column and u integrated
exactly along the lattice diagonals.  Spherical dependence is mode-reduced:
x_I^2 * (spherical Laplacian) acts as + rho_I * lam on each amplitude.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError

GROWTH_LIMIT = 10.0


@dataclass
class CharGrid:
    """Uniform characteristic lattice in (a, b) = (log rho0, log rho_I).

    The a-window [a_min, a_max] is the reporting core; internally the grid
    extends left by one column per b-step (plus guard columns) so that the
    diagonal u-updates never need inflow data.
    """

    b_min: float
    b_max: float
    n_b: int
    a_min: float = -0.7
    a_max: float = 0.0
    lam: float = 0.0
    guard: int = 4
    n_a: int = 0   # overrides a_min when positive

    def __post_init__(self):
        if self.b_min >= self.b_max:
            raise ValueError("need b_min < b_max")
        self.delta = (self.b_max - self.b_min) / (self.n_b - 1)
        if self.n_a > 0:
            n_core = self.n_a
        else:
            n_core = max(int(round((self.a_max - self.a_min) / self.delta)) + 1, 2)
        self.a_min = self.a_max - (n_core - 1) * self.delta
        self.n_a = n_core
        n_ext = n_core + (self.n_b - 1) + self.guard
        self.a_ext = self.a_max - self.delta * np.arange(n_ext - 1, -1, -1)
        self.b = self.b_max - self.delta * np.arange(self.n_b)
        self.core = slice(n_ext - n_core, n_ext)

    @property
    def a_core(self):
        return self.a_ext[self.core]

    @property
    def rho_I(self):
        return np.exp(self.b)

    @property
    def rho0_core(self):
        return np.exp(self.a_core)

    def column_of(self, a_value):
        """Index (into the core) of the column closest to a_value."""
        return int(np.argmin(np.abs(self.a_core - a_value)))


@dataclass
class TransportState:
    u: np.ndarray
    v: np.ndarray
    b: float


@dataclass
class TransportResult:
    grid: CharGrid
    u: np.ndarray               # final slice, core columns
    v: np.ndarray
    sup_series: np.ndarray      # (n_b, ncomp) per-slice sup over core
    energy: np.ndarray          # (n_b,)
    probe_series: np.ndarray    # (n_b, n_probe, ncomp) u at probe columns
    probe_cols: list
    snapshots: list = field(default_factory=list)


def _as_operator(A, n_ext, ncomp):
    """Normalize the A/B argument: None, (d,d) matrix, or callable(a, b)."""
    if A is None:
        def apply(vec, b):
            return np.zeros_like(vec)
        return apply
    if callable(A):
        def apply(vec, b, A=A):
            M = A(b)
            if M.ndim == 2:
                return vec @ M.T
            return np.einsum('aij,aj->ai', M, vec)
        return apply
    M = np.asarray(A, dtype=float)

    def apply(vec, b, M=M):
        return vec @ M.T
    return apply


def transport_solve(grid, A=None, B=None, f=None, data_u=None, data_v=None,
                    probe_a=(), record_snapshots=0, per_slice=None,
                    store_history=False, deterministic=True):
    """March the first-order system from b_max toward scri.

        d_b v = A v + B u + (rho_I lam / 2) u - f/2,
        (d_a - d_b) u = v.

    data_u/data_v: callables of the extended a-grid (or arrays) on the b_max
    slice.  f: callable f(a_ext, b) -> (n_ext, ncomp), or an ndarray indexed
    by slice (n_b, n_ext, ncomp).  per_slice(j, b, u_ext, v_ext) is invoked
    at every recorded slice.  Returns per-slice sup-norms, energies, and
    u-series at the requested probe columns.
    """
    a = grid.a_ext
    n_ext = a.size
    du = data_u(a) if callable(data_u) else np.asarray(data_u, dtype=float)
    dv = data_v(a) if callable(data_v) else np.asarray(data_v, dtype=float)
    u = np.array(du, dtype=float)
    v = np.array(dv, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
        v = v[:, None]
    ncomp = u.shape[1]
    applyA = _as_operator(A, n_ext, ncomp)
    applyB = _as_operator(B, n_ext, ncomp)
    dt = grid.delta
    lam = grid.lam
    b_index = {round(float(bb), 12): j for j, bb in enumerate(grid.b)}

    def source(b):
        if f is None:
            return None
        if callable(f):
            return f(a, b)
        return f[b_index[round(float(b), 12)]]

    def rhs(uu, vv, b):
        out = applyA(vv, b) + applyB(uu, b) + 0.5 * math.exp(b) * lam * uu
        fv = source(b)
        if fv is not None:
            out = out - 0.5 * fv
        return out

    probe_cols = [grid.column_of(x) for x in probe_a]
    core = grid.core
    sup_series = np.zeros((grid.n_b, ncomp))
    energy = np.zeros(grid.n_b)
    probe_series = np.zeros((grid.n_b, len(probe_cols), ncomp))
    snapshots = []
    snap_every = grid.n_b // record_snapshots if record_snapshots else 0
    history = np.zeros((grid.n_b, grid.n_a, ncomp)) if store_history else None

    def record(j, uu, vv):
        cu = uu[core]
        sup_series[j] = np.abs(cu).max(axis=0)
        energy[j] = float(np.sum(cu * cu) + np.sum(vv[core] ** 2)) * dt
        for k, col in enumerate(probe_cols):
            probe_series[j, k] = cu[col]
        if snap_every and j % snap_every == 0:
            snapshots.append(TransportState(cu.copy(), vv[core].copy(), grid.b[j]))
        if history is not None:
            history[j] = cu
        if per_slice is not None:
            per_slice(j, grid.b[j], uu, vv)

    record(0, u, v)
    for j in range(grid.n_b - 1):
        b0 = grid.b[j]
        b1 = grid.b[j + 1]
        k1 = rhs(u, v, b0)
        v_pred = v - dt * k1
        u_next = np.empty_like(u)
        u_next[1:] = u[:-1] + 0.5 * dt * (v[:-1] + v_pred[1:])
        u_next[0] = u_next[1]
        k2 = rhs(u_next, v_pred, b1)
        v_next = v - 0.5 * dt * (k1 + k2)
        u_next[1:] = u[:-1] + 0.5 * dt * (v[:-1] + v_next[1:])
        u_next[0] = u_next[1]
        u, v = u_next, v_next
        if not (np.all(np.isfinite(u[core])) and np.all(np.isfinite(v[core]))):
            raise SolverError(f"NaN at slice {j + 1} (b = {b1:.4f})")
        record(j + 1, u, v)
        if energy[j + 1] > GROWTH_LIMIT * max(energy[j], 1e-300) and energy[j] > 0:
            raise SolverError(
                f"instability: energy grew {energy[j + 1] / energy[j]:.2f}x "
                f"at slice {j + 1} (b = {b1:.4f})")
    result = TransportResult(grid, u[core], v[core], sup_series, energy,
                             probe_series, probe_cols, snapshots)
    if history is not None:
        result.history = history
    return result


def wave_subleading_coeffs(a, b, mass):
    """Exact coefficients of the compactified scalar wave operator beyond the
    transport normal form:  L = -2 (D_b - gamma)(D_a - D_b) + rho_I lam + Ltilde,
    Ltilde = cbb D_b^2 + cb D_b + c0  with

        cbb = -rho_I mu,  cb = rho_I (4 m rho0 rho_I - 1),  c0 = 2 m rho0 rho_I^2,

    mu = 1 - 2 m rho0 rho_I.  (Derived from the exact null-coordinate form of
    the wave operator; flat limit cbb = -rho_I, cb = -rho_I, c0 = 0.)
    """
    rho0 = np.exp(a)
    rhoI = math.exp(b)
    mu = 1.0 - 2.0 * mass * rho0 * rhoI
    cbb = -rhoI * mu
    cb = rhoI * (4.0 * mass * rho0 * rhoI - 1.0)
    c0 = 2.0 * mass * rho0 * rhoI ** 2
    return cbb, cb, c0


def _row_d1(u, delta):
    return np.gradient(u, delta, axis=0, edge_order=2)


def _row_d2(u, delta):
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / delta ** 2
    out[0] = out[1]
    out[-1] = out[-2]
    return out


def damped_wave_solve(grid, mass=0.0, gamma=0.0, source=None, data_u=None,
                      data_v=None, probe_a=(), include_subleading=True,
                      record_snapshots=0):
    """Scalar damped wave equation L u = f with the exact Schwarzschild
    subleading coefficients retained (optionally dropped).

    gamma > 0 is constraint damping (+2 gamma r^{-1} d_t in the unrescaled
    equation); the gauge-change sign enters as gamma = -gammaU > 0.
    """
    a = grid.a_ext
    u = data_u(a) if callable(data_u) else np.array(data_u, dtype=float)
    v = data_v(a) if callable(data_v) else np.array(data_v, dtype=float)
    dt = grid.delta
    lam = grid.lam

    def zrhs(uu, vv, b):
        """D_b v from the full scalar equation (algebraic in the slice)."""
        rhoI = math.exp(b)
        fval = source(a, b) if source is not None else 0.0
        base = fval - 2.0 * gamma * vv - rhoI * lam * uu
        if include_subleading:
            cbb, cb, c0 = wave_subleading_coeffs(a, b, mass)
            ua = _row_d1(uu, dt)
            uaa = _row_d2(uu, dt)
            va = _row_d1(vv, dt)
            base = base - cbb * (uaa - va) - cb * (ua - vv) - c0 * uu
            return base / (-2.0 - cbb)
        return base / -2.0

    sup_series = np.zeros(grid.n_b)
    energy = np.zeros(grid.n_b)
    probe_cols = [grid.column_of(x) for x in probe_a]
    probe_series = np.zeros((grid.n_b, len(probe_cols)))
    core = grid.core
    snapshots = []
    snap_every = grid.n_b // record_snapshots if record_snapshots else 0
    history = [] if record_snapshots == -1 else None

    def record(j, uu, vv):
        cu = uu[core]
        sup_series[j] = np.abs(cu).max()
        energy[j] = float(np.sum(cu * cu) + np.sum(vv[core] ** 2)) * dt
        for k, col in enumerate(probe_cols):
            probe_series[j, k] = cu[col]
        if snap_every and j % snap_every == 0:
            snapshots.append(TransportState(cu.copy(), vv[core].copy(), grid.b[j]))
        if history is not None:
            history.append(cu.copy())

    record(0, u, v)
    for j in range(grid.n_b - 1):
        b0, b1 = grid.b[j], grid.b[j + 1]
        k1 = zrhs(u, v, b0)
        v_pred = v - dt * k1
        u_next = np.empty_like(u)
        u_next[1:] = u[:-1] + 0.5 * dt * (v[:-1] + v_pred[1:])
        u_next[0] = u_next[1]
        k2 = zrhs(u_next, v_pred, b1)
        v_next = v - 0.5 * dt * (k1 + k2)
        u_next[1:] = u[:-1] + 0.5 * dt * (v[:-1] + v_next[1:])
        u_next[0] = u_next[1]
        u, v = u_next, v_next
        if not np.all(np.isfinite(u[core])):
            raise SolverError(f"NaN at slice {j + 1} (b = {b1:.4f})")
        record(j + 1, u, v)
        if energy[j + 1] > GROWTH_LIMIT * max(energy[j], 1e-300) and energy[j] > 0:
            raise SolverError(f"instability at slice {j + 1} (b = {b1:.4f})")

    result = TransportResult(grid, u[core], v[core], sup_series[:, None], energy,
                             probe_series[:, :, None], probe_cols, snapshots)
    if history is not None:
        result.history = np.array(history)
    return result


@dataclass
class DecayFit:
    """Fitted power-law exponent of |field| against rho_I (or rho0)."""

    exponent: float
    window: tuple
    residual: float
    half_width: float
    flags: tuple = ()

    @property
    def rejected(self):
        return self.residual > 0.05 or "all-zero" in self.flags


def decay_fit(values, log_coords, window=None):
    """Least-squares slope of log|values| against the log coordinate.

    window = (lo, hi) restricts to lo <= exp(log_coords) <= hi.  Sign changes
    inside the window flag the fit; an identically zero field returns
    exponent +inf with the all-zero flag.
    """
    values = np.asarray(values, dtype=float)
    log_coords = np.asarray(log_coords, dtype=float)
    mask = np.ones(values.shape, bool)
    if window is not None:
        lo, hi = window
        mask = (log_coords >= math.log(lo)) & (log_coords <= math.log(hi))
    vals = values[mask]
    xs = log_coords[mask]
    if vals.size < 10:
        raise ValueError(f"need >= 10 samples in the fit window, got {vals.size}")
    flags = []
    if np.all(vals == 0.0):
        return DecayFit(math.inf, _win(xs), 0.0, 0.0, ("all-zero",))
    if np.any(vals == 0.0):
        keep = vals != 0.0
        vals, xs = vals[keep], xs[keep]
        flags.append("zeros-dropped")
    if np.any(vals > 0) and np.any(vals < 0):
        flags.append("sign-change")
    y = np.log(np.abs(vals))
    Amat = np.vstack([xs, np.ones_like(xs)]).T
    coef, res, _, _ = np.linalg.lstsq(Amat, y, rcond=None)
    slope, _ = coef
    n = xs.size
    fit = Amat @ coef
    rms = float(np.sqrt(np.mean((y - fit) ** 2)))
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    se = rms / math.sqrt(sxx) if sxx > 0 else math.inf
    return DecayFit(float(slope), _win(xs), rms, 1.96 * se, tuple(flags))


def _win(xs):
    return (float(np.exp(xs.min())), float(np.exp(xs.max())))


def fit_probe_exponent(result, probe_index=0, comp=0, window=(1e-8, 1e-6)):
    """Decay fit of a probe-column u-series against rho_I."""
    series = result.probe_series[:, probe_index, comp]
    return decay_fit(series, result.grid.b, window)


@dataclass
class NormSpec:
    """Weighted b-Sobolev norm H^{k,(alpha0, 2 alphaI)} on the log-box; the
    eb layer adds one level of {d_a, d_b, sqrt(lam) x_I} derivatives."""

    alpha0: float = 0.0
    alphaI: float = 0.0
    k: int = 0
    eb_layers: int = 0
    lam: float = 0.0


def _db_axis(arr, delta, axis):
    return np.gradient(arr, delta, axis=axis, edge_order=2)


def weighted_norm(field, grid, spec):
    """Discrete weighted norm of a field sampled on (b-slices, core columns).

    field[j, i] corresponds to (b_j, a_i); the b-density is the uniform
    measure in (a, b).  Derivatives use centered differences (one-sided at
    edges, which costs one order there).
    """
    field = np.asarray(field, dtype=float)
    if field.ndim != 2:
        raise ValueError("field must be 2-d (b-slices, a-columns)")
    if spec.k > 2 and min(field.shape) < 2 * spec.k + 1:
        warnings.warn("stencil support short near edges; one-sided differences "
                      "reduce the order", RuntimeWarning)
    a = grid.a_core[None, :]
    b = grid.b[:field.shape[0], None]
    w = np.exp(-spec.alpha0 * a - spec.alphaI * b)
    base = w * field
    dt = grid.delta

    layers = {(): base}
    for _ in range(spec.k):
        new = {}
        for key, arr in layers.items():
            new[key + ('a',)] = _db_axis(arr, dt, 1)
            new[key + ('b',)] = _db_axis(arr, dt, 0)
        layers.update(new)
    total = 0.0
    for key, arr in layers.items():
        if len(key) > spec.k:
            continue
        contrib = np.sum(arr * arr)
        if spec.eb_layers:
            da = _db_axis(arr, dt, 1)
            db = _db_axis(arr, dt, 0)
            xI2 = np.exp(b)  # (x_I |mode|)^2 = rho_I lam
            contrib = contrib + np.sum(da * da) + np.sum(db * db) \
                + spec.lam * np.sum(xI2 * arr * arr)
        total += contrib
    return math.sqrt(total * dt * dt)


def qbar_coefficients(alpha0, alphaI, c):
    """Coefficient triple of the commutator-positivity form of the energy
    multiplier W = rho0^{-2 alpha0} rho_I^{-2 alphaI} (rho0 d_rho0
    - (1+c) rho_I d_rho_I):  all three must be positive."""
    return (-4.0 * alphaI,
            4.0 * c * (alpha0 - alphaI),
            1.0 + 2.0 * (alpha0 - alphaI) + c * (1.0 - 2.0 * alphaI))


def energy_diagnostic(grid, mass, forcing, alpha0, alphaI, c, k=1, lam=0.0):
    """Forward solve L u = f with zero data and report the ratio of the
    mixed eb;b norm of u to the b-norm of f, plus the positivity check.

    Requires alphaI < min(alpha0, 0) and c > 0.
    """
    if not (alphaI < min(alpha0, 0.0)):
        raise ValueError(f"need alphaI < min(alpha0, 0); got {alphaI}, {alpha0}")
    if not c > 0.0:
        raise ValueError("need c > 0")
    coeffs = qbar_coefficients(alpha0, alphaI, c)
    if not all(x > 0 for x in coeffs):
        raise AssertionError(f"positivity of the multiplier form failed: {coeffs}")
    grid2 = CharGrid(grid.b_min, grid.b_max, grid.n_b, grid.a_min, grid.a_max,
                     lam=lam, guard=grid.guard)
    res = damped_wave_solve(grid2, mass=mass, gamma=0.0, source=forcing,
                            data_u=lambda a: np.zeros_like(a),
                            data_v=lambda a: np.zeros_like(a),
                            record_snapshots=-1)
    ncore = grid2.n_a
    fgrid = np.array([forcing(grid2.a_core, b) for b in grid2.b])
    u_norm = weighted_norm(res.history, grid2,
                           NormSpec(alpha0, alphaI, k=k, eb_layers=1, lam=lam))
    f_norm = weighted_norm(fgrid, grid2, NormSpec(alpha0, alphaI, k=k))
    if f_norm == 0.0:
        return dict(u_norm=0.0, f_norm=0.0, ratio=0.0, coefficients=coeffs)
    return dict(u_norm=u_norm, f_norm=f_norm, ratio=u_norm / f_norm,
                coefficients=coeffs)


def interpolation_inequality_constant(u, a_order, b_order, c_order):
    """Smallest C with ||D^b u|| <= C ||D^a u||^t ||D^c u||^(1-t) on a periodic
    grid (spectral derivatives), t = (c-b)/(c-a)."""
    u = np.asarray(u, dtype=float)
    n = u.size
    k = np.fft.rfftfreq(n, d=1.0 / n)
    uhat = np.fft.rfft(u)
    # Parseval with the one-sided spectrum: double the interior bins.
    wts = np.ones_like(k)
    wts[1:] = 2.0
    if n % 2 == 0:
        wts[-1] = 1.0

    def dnorm(p):
        return math.sqrt(float(np.sum(wts * (k ** (2 * p)) * np.abs(uhat) ** 2)) / n)

    t = (c_order - b_order) / (c_order - a_order)
    denom = dnorm(a_order) ** t * dnorm(c_order) ** (1.0 - t)
    if denom == 0.0:
        return 0.0
    return dnorm(b_order) / denom
