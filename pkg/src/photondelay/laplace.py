"""Step-gated exponential series and their Laplace-domain counterparts.

Every closed-form amplitude in the model is a finite sum of terms

    Theta(t - t0) * a * (t - t0)**k * exp(-r * (t - t0))

which turn on when light first reaches an atom. Such a sum is the inverse
transform of ``exp(-s t0) * P(s) / prod(s + p_i)``; ``RationalTransform``
holds that form and ``invert`` produces the time-domain terms by residues.
Poles closer than ``confluence_rtol`` (relative to the largest pole
magnitude) are merged into one higher-order pole, which yields the finite
confluent limits (polynomial prefactors in t - t0) instead of 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

CONFLUENCE_RTOL = 1e-6


@dataclass(frozen=True)
class StepTerm:
    turn_on: float
    coefficient: complex
    rate: complex
    order: int = 0

    def __post_init__(self):
        if self.rate.real < -1e-12 * max(1.0, abs(self.rate)):
            raise ValueError("step term must not grow: Re(rate) < 0")
        if self.order < 0:
            raise ValueError("polynomial order must be non-negative")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tau = t - self.turn_on
        # open step: amplitudes vanish exactly at a turn-on; only the initial
        # condition (turn_on = 0) is already present at t = 0
        on = tau >= 0 if self.turn_on <= 0 else tau > 0
        tau = np.where(on, tau, 0.0)
        value = self.coefficient * tau**self.order * np.exp(-self.rate * tau)
        return np.where(on, value, 0.0 + 0.0j)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        return (
            self.coefficient
            * math.factorial(self.order)
            * np.exp(-s * self.turn_on)
            / (s + self.rate) ** (self.order + 1)
        )


@dataclass
class StepSeries:
    """A sum of StepTerms; callable on scalar or array times."""

    terms: list = field(default_factory=list)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for term in self.terms:
            out = out + term(t)
        return out if out.ndim else complex(out)

    def __add__(self, other: "StepSeries") -> "StepSeries":
        return StepSeries(list(self.terms) + list(other.terms))

    def scaled(self, factor: complex) -> "StepSeries":
        return StepSeries(
            [StepTerm(t.turn_on, t.coefficient * factor, t.rate, t.order) for t in self.terms]
        )

    def laplace(self, s):
        return sum((term.laplace(s) for term in self.terms), np.zeros_like(np.asarray(s, dtype=complex)))

    @property
    def turn_on(self) -> float:
        return min((t.turn_on for t in self.terms), default=math.inf)


def cross_moment(a: StepSeries, b: StepSeries, n: int, origin: float | None = None) -> complex:
    """Exact integral of (t - origin)**n * a(t) * conj(b(t)) over all t.

    All terms must share one turn-on time; ``origin`` defaults to it. Every
    pair of terms must decay, i.e. Re(r_k + conj(r_l)) > 0.
    """
    starts = {t.turn_on for t in a.terms} | {t.turn_on for t in b.terms}
    if not starts:
        return 0j
    if len(starts) != 1:
        raise ValueError("cross_moment needs terms with a common turn-on time")
    t0 = starts.pop()
    shift = t0 - (t0 if origin is None else origin)
    total = 0j
    for p in a.terms:
        for q in b.terms:
            rate = p.rate + np.conj(q.rate)
            if rate.real <= 0:
                raise ValueError("divergent moment: non-decaying product of terms")
            k = p.order + q.order
            # (tau + shift)**n expanded binomially
            acc = 0j
            for i in range(n + 1):
                power = k + i
                acc += (
                    math.comb(n, i)
                    * shift ** (n - i)
                    * math.factorial(power)
                    / rate ** (power + 1)
                )
            total += p.coefficient * np.conj(q.coefficient) * acc
    return complex(total)


@dataclass(frozen=True)
class RationalTransform:
    """gain * exp(-s * delay) * prod(s - zeros) / prod(s + poles)."""

    gain: complex
    zeros: tuple = ()
    poles: tuple = ()
    delay: float = 0.0

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        num = np.ones_like(s) * self.gain * np.exp(-s * self.delay)
        for z in self.zeros:
            num = num * (s - z)
        for p in self.poles:
            num = num / (s + p)
        return num

    def pole_distance(self, s) -> float:
        return min((abs(s + p) for p in self.poles), default=math.inf)

    def invert(self, confluence_rtol: float = CONFLUENCE_RTOL) -> StepSeries:
        if len(self.zeros) >= len(self.poles):
            raise ValueError("transform must be strictly proper")
        return StepSeries(_residue_terms(self, confluence_rtol))


def _cluster(poles: Sequence[complex], tol: float) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for p in poles:
        for c in clusters:
            if abs(p - np.mean(c)) <= tol:
                c.append(p)
                break
        else:
            clusters.append([p])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def _series_mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    for i in range(min(n, len(a))):
        width = min(n - i, len(b))
        out[i : i + width] += a[i] * b[:width]
    return out


def _residue_terms(tf: RationalTransform, rtol: float) -> list[StepTerm]:
    poles = [complex(p) for p in tf.poles]
    scale = max((abs(p) for p in poles), default=0.0)
    tol = rtol * scale if scale > 0 else 0.0
    clusters = _cluster(poles, tol)
    terms = []
    for p, k in clusters:
        x0 = -p
        # Taylor series of G(s) = gain * prod(s - z) / prod_{other}(s + q) about x0
        g = np.zeros(k, dtype=complex)
        g[0] = tf.gain
        for z in tf.zeros:
            g = _series_mul(g, np.array([x0 - z, 1.0], dtype=complex), k)
        for q, kq in clusters:
            if q == p:
                continue
            base = x0 + q
            inv = np.array([(-1) ** n / base ** (n + 1) for n in range(k)], dtype=complex)
            for _ in range(kq):
                g = _series_mul(g, inv, k)
        for j in range(k):
            coeff = g[k - 1 - j] / math.factorial(j)
            if coeff != 0:
                terms.append(StepTerm(tf.delay, complex(coeff), p, j))
    return terms
