"""Compactified coordinates near spacelike and null infinity.

The chart covers the far field of a Schwarzschild background of mass m:

    rho0 = 1/(r_* - t),   rho_I = (r_* - t)/r,   x_I = sqrt(rho_I),

with r_* = r + 2m log(r - 2m) the tortoise radius and null coordinates
x0 = t + r_*, x1 = t - r_*.  The product rho0 * rho_I = 1/r holds exactly.
Null infinity is x_I = 0, blown-up spacelike infinity is rho0 = 0.

Tensor components carry the weighting r^s(...) that counts spherical
indices, so that e.g. the background metric has the bounded components
g_{01} = -(1 - 2m/r)/2 and g_{ab} = (round metric) in this frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, ChartDomainError, ChartRangeError, DegenerateMetricError

RHO0_MAX = 2.0

# (a, b) with basis_element in rho0^{-a} x_I^{-b} C^inf(M; S^2 ebT*M),
# block tags follow the 7-block splitting order.
_FRAME_WEIGHTS = {
    "00": (2, 4),
    "01": (2, 2),
    "0s": (2, 3),
    "11": (2, 0),
    "1s": (2, 1),
    "trace": (2, 2),
    "tracefree": (2, 2),
    # 1-form blocks
    "dx0": (1, 2),
    "dx1": (1, 0),
    "sph": (1, 1),
}


@dataclass(frozen=True)
class FrameWeight:
    pow_rho0: int
    pow_xI: int


def frame_weight(block):
    """Conversion weight rho0^{-a} x_I^{-b} between a tilde-frame basis
    tensor and smooth eb-frame sections, per symmetric block tag."""
    try:
        a, b = _FRAME_WEIGHTS[block]
    except KeyError:
        raise KeyError(f"unknown frame block {block!r}; valid: {sorted(_FRAME_WEIGHTS)}")
    return FrameWeight(a, b)


def xI_bound(mass):
    """Upper bound of the x_I range of the chart (mass-dependent branch)."""
    if mass > 0:
        return min(math.sqrt(1.5), 1.0 / math.sqrt(8.0 * mass))
    return math.sqrt(1.5)


def tortoise(r, mass):
    """Tortoise radius r_* = r + 2m log(r - 2m).  Requires r > 2m."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 2.0 * mass) or np.any(r <= 0.0):
        raise ChartDomainError(f"tortoise coordinate needs r > max(0, 2m); got r={r}, m={mass}")
    if mass == 0.0:
        return r + 0.0
    return r + 2.0 * mass * np.log(r - 2.0 * mass)


def invert_tortoise(rstar, mass, rtol=1e-13, max_iter=200):
    """Invert r_* -> r by safeguarded Newton iteration.

    Initial guess r = r_* for r_* > 8m, otherwise a bisection bracket just
    outside the horizon; the Newton step falls back to bisection whenever it
    leaves the current bracket.
    """
    if mass == 0.0:
        if rstar <= 0.0:
            raise ChartDomainError("r_* must be positive for m = 0")
        return float(rstar)

    lo = 2.0 * mass if mass > 0 else 0.0

    def f(r):
        return r + 2.0 * mass * math.log(r - 2.0 * mass) - rstar

    # bracket [a, b] with f(a) < 0 < f(b)
    if mass > 0:
        a = 2.0 * mass + min(1.0, mass) * 1e-14
        while f(a) > 0.0:
            a = 2.0 * mass + (a - 2.0 * mass) * 0.1
            if a - 2.0 * mass < 1e-300:
                raise ChartDomainError(f"cannot bracket r(r_*) for r_*={rstar}, m={mass}")
    else:
        a = 1e-300
    b = max(rstar, lo + 4.0 * abs(mass) + 1.0)
    while f(b) < 0.0:
        b = lo + 2.0 * (b - lo)

    r = rstar if (mass > 0 and rstar > 8.0 * mass) else 0.5 * (a + b)
    if not (a < r < b):
        r = 0.5 * (a + b)
    for _ in range(max_iter):
        fr = f(r)
        if fr < 0.0:
            a = r
        else:
            b = r
        dfr = 1.0 + 2.0 * mass / (r - 2.0 * mass)
        step = fr / dfr
        r_new = r - step
        if not (a < r_new < b):
            r_new = 0.5 * (a + b)
        if abs(r_new - r) <= rtol * abs(r_new):
            return r_new
        r = r_new
    return r


@dataclass(frozen=True)
class CompactPoint:
    """A spacetime point in compactified coordinates.

    rho0 and xI are the defining functions of blown-up spacelike infinity
    and of null infinity; theta/phi locate the point on the sphere (they
    may be omitted for mode-reduced work).  The mass enters only through
    the derived tortoise/null coordinates.
    """

    rho0: float
    xI: float
    theta: float = math.pi / 2
    phi: float = 0.0
    mass: float = 0.0
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.check:
            if not (0.0 < self.rho0 < RHO0_MAX):
                raise ChartRangeError(f"rho0={self.rho0} outside (0, {RHO0_MAX})")
            bound = xI_bound(self.mass)
            if not (0.0 < self.xI < bound):
                raise ChartRangeError(f"xI={self.xI} outside (0, {bound}) for m={self.mass}")

    @property
    def rho_I(self):
        return self.xI ** 2

    @property
    def rho(self):
        return self.rho0 * self.rho_I

    @property
    def r(self):
        return 1.0 / (self.rho0 * self.rho_I)

    @property
    def x1(self):
        return -1.0 / self.rho0

    @property
    def rstar(self):
        return float(tortoise(self.r, self.mass))

    @property
    def x0(self):
        return self.rstar * 2.0 + self.x1

    @property
    def t(self):
        return self.rstar - 1.0 / self.rho0


def compactify(t, rstar, mass=0.0, theta=math.pi / 2, phi=0.0):
    """Map (t, r_*) to a CompactPoint; inverse of decompactify."""
    if rstar <= t:
        raise ChartDomainError(f"need r_* - t > 0, got t={t}, r_*={rstar}")
    rho0 = 1.0 / (rstar - t)
    r = invert_tortoise(rstar, mass)
    rho_I = (rstar - t) / r
    return CompactPoint(rho0=rho0, xI=math.sqrt(rho_I), theta=theta, phi=phi, mass=mass)


def decompactify(point):
    """Return (t, r_*) of a CompactPoint."""
    return point.t, point.rstar


@dataclass(frozen=True)
class Background:
    """Schwarzschild background plus the domain/weight parameters.

    The working domain is Omega = {x_I < c, rho0 < 1 + rho_I^ellI / 2}.
    The weights must satisfy ellI < min(ell0, 1/2); the coupling to the
    gauge-change strength (ellI < -gammaU) is checked where both are known.
    """

    mass: float = 0.0
    c: float = 0.7
    ell0: float = 0.5
    ellI: float = 0.25

    def __post_init__(self):
        if not (0.0 < self.c < xI_bound(self.mass)):
            raise AdmissibilityError(
                f"domain bound c={self.c} outside (0, {xI_bound(self.mass)}) for m={self.mass}")
        if not (0.0 < self.ellI < min(self.ell0, 0.5)):
            raise AdmissibilityError(
                f"need 0 < ellI < min(ell0, 1/2); got ellI={self.ellI}, ell0={self.ell0}")

    def in_domain(self, point):
        return point.xI < self.c and point.rho0 < 1.0 + 0.5 * point.rho_I ** self.ellI

    def point(self, rho0, xI, theta=math.pi / 2, phi=0.0):
        return CompactPoint(rho0=rho0, xI=xI, theta=theta, phi=phi, mass=self.mass)


def round_metric(theta):
    """Round metric and inverse on S^2 in (theta, phi) coordinates."""
    s2 = math.sin(theta) ** 2
    gs = np.array([[1.0, 0.0], [0.0, s2]])
    gs_inv = np.array([[1.0, 0.0], [0.0, 1.0 / s2]])
    return gs, gs_inv


def schwarzschild_metric(point, mass):
    """Weighted components g_{mu nu} (4x4, index order x0, x1, theta, phi)."""
    g = np.zeros((4, 4))
    g[0, 1] = g[1, 0] = -0.5 * (1.0 - 2.0 * mass / point.r)
    gs, _ = round_metric(point.theta)
    g[2:, 2:] = gs
    return g


def metric(point, mass, h=None):
    """Metric g = g_m + h/r in weighted tilde-frame components.

    h, when present, must provide weighted components via
    h.components(point); smallness is the caller's responsibility but the
    Lorentzian signature is verified.
    """
    g = schwarzschild_metric(point, mass)
    if h is not None:
        g = g + h.components(point) / point.r
    _check_lorentzian(g)
    return g


def dual_metric(point, mass, h=None, g=None):
    """Inverse metric in weighted components (weighted-matrix inverse)."""
    if g is None:
        g = metric(point, mass, h)
    return np.linalg.inv(g)


def _check_lorentzian(g):
    det = np.linalg.det(g)
    if not np.isfinite(det) or abs(det) < 1e-14:
        raise DegenerateMetricError(f"metric degenerate: det={det}")
    ev = np.linalg.eigvalsh(g)
    if not (ev[0] < 0.0 and np.all(ev[1:] > 0.0)):
        raise DegenerateMetricError(f"metric lost Lorentzian signature: eigenvalues {ev}")


def causal_class(point, g_dual, omega, zero_tol=1e-12):
    """Classify a weighted-frame covector by the sign of g^{-1}(omega, omega).

    Returns (label, value) with label in {'timelike', 'null', 'spacelike'};
    |value| below zero_tol * ||omega||^2 counts as null.
    """
    omega = np.asarray(omega, dtype=float)
    q = float(omega @ g_dual @ omega)
    tol = zero_tol * float(omega @ omega)
    if abs(q) <= tol:
        return "null", q
    return ("timelike", q) if q < 0.0 else ("spacelike", q)


def covector_dx0():
    return np.array([1.0, 0.0, 0.0, 0.0])


def covector_dx1():
    return np.array([0.0, 1.0, 0.0, 0.0])


def covector_dt():
    # dt = (dx0 + dx1)/2
    return np.array([0.5, 0.5, 0.0, 0.0])


def covector_r_drho_I(point, mass):
    """r d(rho_I) = a0 dx0 - a1 dx1 with a0 = (x1/2r)(1-2m/r), a1 = 1 + a0."""
    a0 = 0.5 * (point.x1 / point.r) * (1.0 - 2.0 * mass / point.r)
    return np.array([a0, -(1.0 + a0), 0.0, 0.0])


def covector_sigma_f(point, mass, ellI):
    """Differential of the defining function rho0 - rho_I^ellI / 2 of the
    future boundary Sigma_f, in weighted components."""
    a0 = 0.5 * (point.x1 / point.r) * (1.0 - 2.0 * mass / point.r)
    rdrho_I = np.array([a0, -(1.0 + a0), 0.0, 0.0])
    drho0 = np.array([0.0, point.rho0 ** 2, 0.0, 0.0])
    return drho0 - 0.5 * ellI * point.rho_I ** (ellI - 1.0) * rdrho_I / point.r
