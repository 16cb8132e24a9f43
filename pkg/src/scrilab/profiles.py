"""Closed-form perturbation profiles with analytic derivatives.

A profile fixes the ten amplitude functions of a symmetric 2-tensor in the
7-block splitting, each a product of one-dimensional factors in rho0 (powers,
bumps, trig in x1 = -1/rho0), rho_I (powers), and theta.  All first and
second derivatives are hand-coded, so the general-relativity operators can
be evaluated pointwise without any symbolic machinery.  Profiles are
axisymmetric (no phi dependence).

Conforming profiles of order (ell0, ellI): amplitudes in ran(pi^C + pi^Ups)
decay like rho_I^ellI, while the (dx1)^2 and tracefree blocks carry a
rho_I-independent leading term plus a rho_I^(2 ellI) remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensors import BLOCK_SLOTS, DIM


class Factor1D:
    """Scalar factor f(s) with two derivatives."""

    def val(self, s):
        raise NotImplementedError

    def d1(self, s):
        raise NotImplementedError

    def d2(self, s):
        raise NotImplementedError


@dataclass(frozen=True)
class One(Factor1D):
    def val(self, s):
        return 1.0

    def d1(self, s):
        return 0.0

    def d2(self, s):
        return 0.0


@dataclass(frozen=True)
class Power(Factor1D):
    """s^alpha (optionally scaled)."""

    alpha: float
    scale: float = 1.0

    def val(self, s):
        return self.scale * s ** self.alpha

    def d1(self, s):
        return self.scale * self.alpha * s ** (self.alpha - 1.0)

    def d2(self, s):
        return self.scale * self.alpha * (self.alpha - 1.0) * s ** (self.alpha - 2.0)


@dataclass(frozen=True)
class OnePlusPower(Factor1D):
    """1 + beta * s^alpha."""

    alpha: float
    beta: float

    def val(self, s):
        return 1.0 + self.beta * s ** self.alpha

    def d1(self, s):
        return self.beta * self.alpha * s ** (self.alpha - 1.0)

    def d2(self, s):
        return self.beta * self.alpha * (self.alpha - 1.0) * s ** (self.alpha - 2.0)


@dataclass(frozen=True)
class TrigX1(Factor1D):
    """sin(k*x1 + phase) as a function of rho0, with x1 = -1/rho0."""

    k: float = 1.0
    phase: float = 0.0

    def _x1(self, s):
        return -1.0 / s

    def val(self, s):
        return math.sin(self.k * self._x1(s) + self.phase)

    def d1(self, s):
        # dx1/drho0 = 1/rho0^2
        return math.cos(self.k * self._x1(s) + self.phase) * self.k / s ** 2

    def d2(self, s):
        x = self.k * self._x1(s) + self.phase
        return (-math.sin(x) * (self.k / s ** 2) ** 2
                - math.cos(x) * 2.0 * self.k / s ** 3)


@dataclass(frozen=True)
class Bump(Factor1D):
    """C^inf bump exp(1 - 1/(1 - z^2)) on |z| < 1, z = (s - center)/width."""

    center: float
    width: float

    def _z(self, s):
        return (s - self.center) / self.width

    def val(self, s):
        z = self._z(s)
        if abs(z) >= 1.0:
            return 0.0
        return math.exp(1.0 - 1.0 / (1.0 - z * z))

    def d1(self, s):
        z = self._z(s)
        if abs(z) >= 1.0:
            return 0.0
        g = 1.0 - z * z
        return self.val(s) * (-2.0 * z / g ** 2) / self.width

    def d2(self, s):
        z = self._z(s)
        if abs(z) >= 1.0:
            return 0.0
        g = 1.0 - z * z
        # d/dz of -2z/g^2 = (-2 g - 8 z^2) / g^3 ... computed directly:
        first = -2.0 * z / g ** 2
        dfirst = (-2.0 * g ** 2 - (-2.0 * z) * 2.0 * g * (-2.0 * z)) / g ** 4
        return self.val(s) * (first * first + dfirst) / self.width ** 2


@dataclass(frozen=True)
class SinTheta(Factor1D):
    """sin(theta) (smooth angular factor)."""

    def val(self, s):
        return math.sin(s)

    def d1(self, s):
        return math.cos(s)

    def d2(self, s):
        return -math.sin(s)


@dataclass(frozen=True)
class CosTheta(Factor1D):
    def val(self, s):
        return math.cos(s)

    def d1(self, s):
        return -math.sin(s)

    def d2(self, s):
        return -math.cos(s)


@dataclass(frozen=True)
class Amplitude:
    """Separable amplitude c * f(rho0) * g(rho_I) * w(theta)."""

    coeff: float = 0.0
    f_rho0: Factor1D = One()
    f_rhoI: Factor1D = One()
    f_theta: Factor1D = One()

    def stack(self, rho0, rhoI, theta):
        """Value and all partials up to second order in (rho0, rhoI, theta).

        Returns (val, grad[3], hess[3][3]) with hess symmetric.
        """
        f0, f1, ft = self.f_rho0, self.f_rhoI, self.f_theta
        v0, d0, s0 = f0.val(rho0), f0.d1(rho0), f0.d2(rho0)
        v1, d1, s1 = f1.val(rhoI), f1.d1(rhoI), f1.d2(rhoI)
        vt, dt, st = ft.val(theta), ft.d1(theta), ft.d2(theta)
        c = self.coeff
        val = c * v0 * v1 * vt
        grad = np.array([c * d0 * v1 * vt, c * v0 * d1 * vt, c * v0 * v1 * dt])
        hess = np.array([
            [c * s0 * v1 * vt, c * d0 * d1 * vt, c * d0 * v1 * dt],
            [c * d0 * d1 * vt, c * v0 * s1 * vt, c * v0 * d1 * dt],
            [c * d0 * v1 * dt, c * v0 * d1 * dt, c * v0 * v1 * st],
        ])
        return val, grad, hess


class SumAmplitude:
    """Sum of separable amplitudes."""

    def __init__(self, *terms):
        self.terms = [t for t in terms if t.coeff != 0.0]

    def stack(self, rho0, rhoI, theta):
        val = 0.0
        grad = np.zeros(3)
        hess = np.zeros((3, 3))
        for t in self.terms:
            v, g, h = t.stack(rho0, rhoI, theta)
            val += v
            grad += g
            hess += h
        return val, grad, hess


ZERO_AMPLITUDE = SumAmplitude()


def coordinate_jets(point, mass):
    """First and second partials of (rho0, rho_I) with respect to (x0, x1).

    Exact closed forms: rho0 = -1/x1 and the chain rule through
    mu = 1 - 2 m rho0 rho_I, r = 1/(rho0 rho_I).  Returns
    (J[2][2], H[2][2][2]) with J[i][k] = d rho_i / d x^k and
    H[i][k][l] = d^2 rho_i / d x^k d x^l (k, l in {0, 1}).
    """
    r0, rI = point.rho0, point.rho_I
    mu = 1.0 - 2.0 * mass * r0 * rI

    r0_0, r0_1 = 0.0, r0 ** 2
    A = -0.5 * r0 * rI ** 2 * mu        # d rho_I / d x0
    B = -r0 * rI * (1.0 - 0.5 * rI * mu)  # d rho_I / d x1

    mu_0 = -2.0 * mass * r0 * A
    mu_1 = -2.0 * mass * (r0_1 * rI + r0 * B)

    # second partials of rho0
    r0_00 = 0.0
    r0_01 = 0.0
    r0_11 = 2.0 * r0 * r0_1

    # second partials of rho_I
    A_0 = -0.5 * r0 * (2.0 * rI * A * mu + rI ** 2 * mu_0)
    A_1 = -0.5 * (r0_1 * rI ** 2 * mu + r0 * (2.0 * rI * B * mu + rI ** 2 * mu_1))
    B_1 = -(r0_1 * rI + r0 * B) + 0.5 * (
        r0_1 * rI ** 2 * mu + r0 * (2.0 * rI * B * mu + rI ** 2 * mu_1))

    J = np.array([[r0_0, r0_1], [A, B]])
    H = np.array([[[r0_00, r0_01], [r0_01, r0_11]],
                  [[A_0, A_1], [A_1, B_1]]])
    return J, H


@dataclass
class PerturbationProfile:
    """Ten closed-form split amplitudes plus decay metadata.

    amplitudes[i] follows the slot order of tensors.BLOCK_SLOTS; epsilon
    scales every component linearly.
    """

    amplitudes: list
    epsilon: float = 1.0
    ell0: float = 0.5
    ellI: float = 0.25
    name: str = "custom"
    mass: float = field(default=0.0)

    def scaled(self, epsilon):
        return PerturbationProfile(self.amplitudes, epsilon, self.ell0, self.ellI,
                                   self.name, self.mass)

    def _amp_jets(self, point):
        out = []
        for amp in self.amplitudes:
            v, g, h = amp.stack(point.rho0, point.rho_I, point.theta)
            out.append((self.epsilon * v, self.epsilon * g, self.epsilon * h))
        return out

    def split_values(self, point):
        """Ten amplitudes at the point."""
        return np.array([j[0] for j in self._amp_jets(point)])

    def _x1_jets(self, point, mass):
        """Value, d1 = d/dx1, d11 = d^2/(dx1)^2 for each amplitude."""
        J, H = coordinate_jets(point, mass)
        out_v = np.zeros(DIM)
        out_1 = np.zeros(DIM)
        out_11 = np.zeros(DIM)
        for i, (v, g, h) in enumerate(self._amp_jets(point)):
            # chain rule in (rho0, rho_I); theta held fixed
            d1 = g[0] * J[0, 1] + g[1] * J[1, 1]
            d11 = (h[0, 0] * J[0, 1] ** 2 + 2.0 * h[0, 1] * J[0, 1] * J[1, 1]
                   + h[1, 1] * J[1, 1] ** 2 + g[0] * H[0, 1, 1] + g[1] * H[1, 1, 1])
            out_v[i] = v
            out_1[i] = d1
            out_11[i] = d11
        return out_v, out_1, out_11

    def split_d1(self, point):
        """d/dx1 of the ten amplitudes (exact chain rule)."""
        return self._x1_jets(point, self.mass)[1]

    def split_d1d1(self, point):
        """Second x1-derivatives of the ten amplitudes."""
        return self._x1_jets(point, self.mass)[2]

    def components(self, point):
        """Weighted tensor components h_{mu nu} (4x4, coordinate sphere
        indices carrying the round-metric structure)."""
        a = self.split_values(point)
        st = math.sin(point.theta)
        h = np.zeros((4, 4))
        h[0, 0] = a[0]
        h[0, 1] = h[1, 0] = a[1]
        h[0, 2] = h[2, 0] = a[2]
        h[0, 3] = h[3, 0] = a[3] * st
        h[1, 1] = a[4]
        h[1, 2] = h[2, 1] = a[5]
        h[1, 3] = h[3, 1] = a[6] * st
        h[2, 2] = a[7] + a[8]
        h[2, 3] = h[3, 2] = a[9] * st
        h[3, 3] = (a[7] - a[8]) * st * st
        return h

    def scri_leading(self, rho0, theta=math.pi / 2):
        """Leading terms (h11, p, q) on scri at given rho0 (rho_I -> 0 limit
        of the amplitudes; valid for profiles polynomial in rho_I powers)."""
        vals = []
        for slot in (4, 8, 9):
            amp = self.amplitudes[slot]
            total = 0.0
            for t in getattr(amp, "terms", [amp]):
                g = t.f_rhoI
                if isinstance(g, One) or isinstance(g, OnePlusPower):
                    total += t.coeff * t.f_rho0.val(rho0) * t.f_theta.val(theta)
            vals.append(self.epsilon * total)
        return dict(h11=vals[0], p=vals[1], q=vals[2])


def zero_profile(ell0=0.5, ellI=0.25):
    return PerturbationProfile([ZERO_AMPLITUDE] * DIM, 0.0, ell0, ellI, "zero")


def conforming_profile(ell0=0.5, ellI=0.2, epsilon=1e-2, k=1.0, with_angles=True):
    """Generic member of the perturbation class of order (ell0, ellI).

    CUpsilon amplitudes carry rho0^ell0 rho_I^ellI with trigonometric
    x1-dependence; the (dx1)^2 and tracefree blocks get rho_I-independent
    leading terms plus rho_I^(2 ellI) corrections.
    """
    ang = SinTheta() if with_angles else One()

    def trig(c, ph, f_theta=One()):
        return SumAmplitude(Amplitude(c, _PowerTrig(ell0, k, ph), Power(ellI), f_theta))

    def lead(c, ph, c2):
        # rho_I-independent leading term + rho_I^(2 ellI) remainder
        return SumAmplitude(Amplitude(c, _PowerTrig(ell0, k, ph), One(), One()),
                            Amplitude(c2, Power(ell0), Power(2.0 * ellI), One()))

    amps = [
        trig(1.00, 0.0),                       # 00
        trig(0.80, 0.3),                       # 01
        trig(0.60, 0.9, ang), trig(-0.50, 1.7),  # 0s
        lead(0.90, 0.5, 0.40),                 # 11
        trig(0.70, 2.1), trig(0.45, 0.2),      # 1s
        trig(-0.65, 1.1),                      # trace
        lead(0.75, 0.8, -0.30),                # tf p
        lead(-0.55, 1.4, 0.20),                # tf q
    ]
    return PerturbationProfile(amps, epsilon, ell0, ellI, "conforming")


@dataclass(frozen=True)
class _PowerTrig(Factor1D):
    """rho0^alpha * sin(k x1 + phase); product hand-coded."""

    alpha: float
    k: float
    phase: float

    def val(self, s):
        return Power(self.alpha).val(s) * TrigX1(self.k, self.phase).val(s)

    def d1(self, s):
        p, t = Power(self.alpha), TrigX1(self.k, self.phase)
        return p.d1(s) * t.val(s) + p.val(s) * t.d1(s)

    def d2(self, s):
        p, t = Power(self.alpha), TrigX1(self.k, self.phase)
        return p.d2(s) * t.val(s) + 2.0 * p.d1(s) * t.d1(s) + p.val(s) * t.d2(s)


def single_block_profile(slot, amplitude, ell0=0.5, ellI=0.25, epsilon=1.0):
    """Profile exciting a single amplitude slot (used as probe direction)."""
    amps = [ZERO_AMPLITUDE] * DIM
    amps = list(amps)
    amps[slot] = SumAmplitude(amplitude) if isinstance(amplitude, Amplitude) else amplitude
    return PerturbationProfile(amps, epsilon, ell0, ellI, f"slot{slot}")


def sin_x1_profile(slot=4, epsilon=1.0, k=1.0):
    """h with a single sin(x1) component (the classic B-matrix test case)."""
    return single_block_profile(slot, Amplitude(1.0, TrigX1(k), One(), One()),
                                epsilon=epsilon)


def probe_direction(slot, sigma=0.0):
    """Direction rho0^sigma e_slot with no rho_I or theta dependence."""
    return single_block_profile(slot, Amplitude(1.0, Power(sigma), One(), One()))
