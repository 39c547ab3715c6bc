"""Temporal centre of gravity, t_arr = int t I(t) dt / int I(t) dt."""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad, simpson

from .laplace import StepSeries, cross_moment


class QuadratureError(RuntimeError):
    pass


def arrival_time(intensity, t_start: float = 0.5, scale: float = 1.0, rtol: float = 1e-8,
                 tail_rtol: float = 1e-8, t_max: float | None = None, max_chunks: int = 200) -> float:
    """First moment of a non-negative ``intensity(t)`` supported on t >= t_start.

    Integrates adaptively over chunks [t_start + scale*(2^k - 1), ...] of
    doubling width until a chunk adds less than ``tail_rtol`` of both
    running moments (or ``t_max`` is reached). ``scale`` should be the
    shortest time scale of the signal.
    """
    m0 = m1 = err0 = err1 = 0.0
    lo, width = t_start, scale
    for _ in range(max_chunks):
        hi = lo + width if t_max is None else min(lo + width, t_max)
        v0, e0 = quad(intensity, lo, hi, epsrel=rtol, epsabs=0, limit=500)
        v1, e1 = quad(lambda t: (t - t_start) * intensity(t), lo, hi, epsrel=rtol, epsabs=0, limit=500)
        m0, m1, err0, err1 = m0 + v0, m1 + v1, err0 + e0, err1 + e1
        if t_max is not None and hi >= t_max:
            break
        if m0 > 0 and abs(v0) <= tail_rtol * m0 and abs(v1) <= tail_rtol * abs(m1):
            break
        lo, width = hi, 2 * width
    else:
        raise QuadratureError("moment tail did not converge")
    if m0 <= 0:
        raise QuadratureError("zero-norm trace has no arrival time")
    achieved = max(err0 / m0, err1 / abs(m1) if m1 else 0.0)
    if achieved > 100 * rtol:
        raise QuadratureError(f"quadrature did not converge: achieved relative error {achieved:.3g}")
    return t_start + m1 / m0


def arrival_time_series(series: StepSeries) -> float:
    """Exact centre of gravity of |series(t)|^2 via closed-form exponential moments."""
    m0 = cross_moment(series, series, 0).real
    if m0 <= 0:
        raise QuadratureError("zero-norm trace has no arrival time")
    return series.turn_on + cross_moment(series, series, 1).real / m0


def arrival_time_sampled(times, intensity) -> float:
    times = np.asarray(times, dtype=float)
    intensity = np.asarray(intensity, dtype=float)
    m0 = simpson(intensity, x=times)
    if m0 <= 0:
        raise QuadratureError("zero-norm trace has no arrival time")
    return float(simpson(times * intensity, x=times) / m0)
