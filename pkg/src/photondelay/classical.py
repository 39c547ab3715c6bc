"""Thin slab of damped charged oscillators (Lorentz medium).

Steady-state transmission, index, absorption and the phase/group delays,
plus the time-domain response to a suddenly switched-on, exponentially
decaying drive, which is the classical counterpart of a spontaneously
emitted photon.

Conventions: analytic signals ``E(t) = envelope(t) * exp(-i w1 t)``; the
carrier is kept symbolic and never sampled. The incident pulse
``Theta(t-1/2) C exp[-(g1/2 + i w1)(t-1/2)]`` differs from that convention
by exp(i w1/2), which equals one when the cavity holds an integer number of
wavelengths between source and detector (m0 divisible by 4), so envelopes
of incident and scattered fields add directly. The drive constant C is 1.

The steady-state prefactors in terms of the slab parameters are

    n - 1 = -(N q^2 / m eps0 w0 gamma) * gamma d / (4 d^2 + gamma^2)
    alpha =  (N q^2 / m eps0 c gamma) * gamma^2 / (4 d^2 + gamma^2)

and with f = q^2 N dz / (2 m eps0 c gamma), N q^2/(m eps0 gamma) = 2 f c/dz.
``density_scale`` below is 2 f / dz (c = 1), so n - 1 = -(density_scale/w0)
* gamma d/(4 d^2 + gamma^2) and alpha = density_scale * gamma^2/(4 d^2 + gamma^2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cog import QuadratureError, arrival_time

__all__ = [
    "ClassicalMedium", "ComplexSignal", "QuadratureError", "absorption_coefficient", "arrival_time",
    "classical_cog_delay", "classical_scattered_field", "group_delay", "incident_field", "phase_delay",
    "refractive_index", "scattering_block", "transient_oscillator", "transmitted_field_exact",
    "transmitted_field_weak",
]


@dataclass(frozen=True)
class ClassicalMedium:
    f: float
    gamma: float
    omega0: float = 1e6

    def __post_init__(self):
        if self.f < 0:
            raise ValueError("scattering strength f must be non-negative")
        if self.gamma <= 0:
            raise ValueError("damping rate gamma must be positive")
        if self.omega0 < 10 * self.gamma:
            warnings.warn("omega0 < 10*gamma: near-resonance approximations are poor", stacklevel=2)


@dataclass(frozen=True)
class ComplexSignal:
    """Analytic signal ``envelope * exp(-i carrier t)``; physical field is the real part."""

    envelope: complex | np.ndarray
    carrier: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.envelope)):
            raise ValueError("signal is not finite")

    def value(self, t):
        return self.envelope * np.exp(-1j * self.carrier * np.asarray(t))

    def physical(self, t):
        return np.real(self.value(t))


def _lorentz(med: ClassicalMedium, delta):
    delta = np.asarray(delta, dtype=float)
    return 4 * delta**2 + med.gamma**2


def transmitted_field_exact(med: ClassicalMedium, delta):
    """Transmission factor E_t/E_i = 1 - i f gamma / (2 delta + i gamma)."""
    delta = np.asarray(delta, dtype=float)
    return 1 - 1j * med.f * med.gamma / (2 * delta + 1j * med.gamma)


def transmitted_field_weak(med: ClassicalMedium, delta):
    """Exponentiated transmission factor, valid to first order in f."""
    if med.f > 0.1:
        raise ValueError("weak-scattering form invalid for f > 0.1")
    den = _lorentz(med, delta)
    delta = np.asarray(delta, dtype=float)
    return np.exp(-med.f * med.gamma**2 / den) * np.exp(-2j * med.f * med.gamma * delta / den)


def refractive_index(med: ClassicalMedium, delta, density_scale: float | None = None):
    k = 2 * med.f if density_scale is None else density_scale
    delta = np.asarray(delta, dtype=float)
    return 1 - (k / med.omega0) * med.gamma * delta / _lorentz(med, delta)


def absorption_coefficient(med: ClassicalMedium, delta, density_scale: float | None = None):
    k = 2 * med.f if density_scale is None else density_scale
    return k * med.gamma**2 / _lorentz(med, delta)


def phase_delay(med: ClassicalMedium, delta):
    delta = np.asarray(delta, dtype=float)
    return -(2 * med.f / med.omega0) * med.gamma * delta / _lorentz(med, delta)


def group_delay(med: ClassicalMedium, delta):
    """Group delay 2 f gamma (4 d^2 - gamma^2) / (4 d^2 + gamma^2)^2; negative for |d| < gamma/2."""
    delta = np.asarray(delta, dtype=float)
    return 2 * med.f * med.gamma * (4 * delta**2 - med.gamma**2) / _lorentz(med, delta) ** 2


def _relaxed_difference(rate_a: complex, rate_b: complex, tau):
    """(exp(-rate_a tau) - exp(-rate_b tau)) / (rate_b - rate_a), finite at rate_a == rate_b."""
    if rate_a.real > rate_b.real:
        rate_a, rate_b = rate_b, rate_a  # symmetric; keeps expm1's argument non-growing
    tau = np.asarray(tau, dtype=float)
    x = (rate_a - rate_b) * tau
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    phi = np.where(small, 1 + x / 2, np.expm1(safe) / safe)
    return tau * np.exp(-rate_a * tau) * phi


def _after_turn_on(t):
    return np.where(t > 0.5, 1.0, 0.0)


def transient_oscillator(med: ClassicalMedium, gamma1: float, delta: float, t):
    """Oscillator displacement driven by the decaying incident pulse (q/m = 1).

    Returns the envelope with carrier exp(-i w1 (t - 1/2)), w1 = omega0 + delta.
    """
    t = np.asarray(t, dtype=float)
    tau = np.maximum(t - 0.5, 0.0)
    w1, w2, g1, g2 = med.omega0 + delta, med.omega0, gamma1, med.gamma
    den = w2**2 - w1**2 + 1j * w1 * (g1 - g2) + g1**2 / 4 - g1 * g2 / 2
    r1 = complex(g1 / 2)
    r2 = g2 / 2 - 1j * delta
    if den == 0:
        raise ValueError("oscillator drive exactly on the approximate resonance pole")
    value = (r2 - r1) * _relaxed_difference(r1, r2, tau) / den
    return ComplexSignal(_after_turn_on(t) * value, w1)


def scattering_block(gamma1: float, gamma2: float, delta: float, t):
    """-i gamma2 / [2 delta - i (gamma1 - gamma2)] * {e^{-g1 tau/2} - e^{-(g2/2 - i delta) tau}}.

    Shared functional form of every scattered signal. Evaluated through
    expm1 so the removable singularity at 2 delta = i (gamma1 - gamma2) is
    finite (limit: -gamma2 tau/2 e^{-gamma1 tau/2}).
    """
    t = np.asarray(t, dtype=float)
    tau = np.maximum(t - 0.5, 0.0)
    r1, r2 = complex(gamma1 / 2), gamma2 / 2 - 1j * delta
    # -i g2 / (2 d - i (g1 - g2)) = -g2 / (2 (r2 - r1)) ... times (e1 - e2)
    value = -gamma2 / 2 * _relaxed_difference(r1, r2, tau)
    return _after_turn_on(t) * value


def incident_field(med: ClassicalMedium, gamma1: float, delta: float, t) -> ComplexSignal:
    t = np.asarray(t, dtype=float)
    tau = np.maximum(t - 0.5, 0.0)
    return ComplexSignal(_after_turn_on(t) * np.exp(-gamma1 * tau / 2), med.omega0 + delta)


def classical_scattered_field(med: ClassicalMedium, gamma1: float, delta: float, t) -> ComplexSignal:
    """Field re-radiated by the slab, C f gamma2 times the scattering block."""
    block = scattering_block(gamma1, med.gamma, delta, t)
    return ComplexSignal(med.f * block, med.omega0 + delta)


def classical_cog_delay(med: ClassicalMedium, gamma1: float, delta: float,
                        rtol: float = 1e-8, t_max: float | None = None) -> float:
    """Centre-of-gravity delay of |E|^2 with the slab relative to without it."""
    if med.f == 0:
        return 0.0
    slow = min(gamma1, med.gamma)
    if slow <= 0:
        raise ValueError("gamma1 must be positive for finite moments")
    t_max = 0.5 + 60.0 / slow if t_max is None else t_max
    scale = 1.0 / max(gamma1, med.gamma, abs(delta))

    def with_slab(t):
        e = incident_field(med, gamma1, delta, t).envelope + classical_scattered_field(med, gamma1, delta, t).envelope
        return float(abs(e) ** 2)

    def without(t):
        return float(abs(incident_field(med, gamma1, delta, t).envelope) ** 2)

    kw = dict(t_start=0.5, scale=scale, rtol=rtol, t_max=t_max)
    return arrival_time(with_slab, **kw) - arrival_time(without, **kw)
