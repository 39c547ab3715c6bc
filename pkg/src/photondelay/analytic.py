"""Closed-form amplitudes of the three-atom model, first turn-on terms only.

The amplitudes are obtained by inverting the leading-order Laplace
transforms (rotating frame at the source frequency):

    c1~(s) = 2/(2s+g1) + 4 e^{-s/2} g1 (s+g2-i d) / ((2s+g1)^2 (2s+g2-2i d))
    c2~(s) = -2 e^{-s/4} sqrt(g1 g2) / ((2s+g1)(2s+g2-2i d))
    c3~(s) = -4 e^{-s/2} sqrt(g1 g3) (s-i d) / ((2s+g1)(2s+g3)(2s+g2-2i d))
    b_m~(s) = -i (g_1m c1~ + g_2m c2~) / (s + i m pi)

Each result is a ``StepSeries``; confluent parameter sets (e.g.
g1 - g2 + 2i d = 0) are handled inside the residue inversion.

Positions are fixed at (1/4, 1/2, 3/4). Series are truncated where the next
reflection or multiple-scattering term would switch on, so each amplitude
carries a validity window; evaluating beyond it raises
``TruncationWindowError`` unless ``allow_truncated`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laplace import CONFLUENCE_RTOL, RationalTransform, StepSeries
from .params import DELTA_C, SystemConfig, coupling_matrix, parity_sign
from .trace import AmplitudeTrace

# first time the omitted "+..." terms can contribute
WINDOWS = {"c1": 0.75, "c2": 0.75, "c3": 1.0, "b": 0.5, "field": 1.0}


class TruncationWindowError(ValueError):
    pass


def _check_positions(cfg: SystemConfig) -> None:
    if not cfg.default_positions:
        raise ValueError("closed forms require atoms at z = 1/4, 1/2, 3/4")


def _check_window(name: str, t, allow_truncated: bool) -> None:
    if allow_truncated:
        return
    limit = WINDOWS[name]
    if np.any(np.asarray(t) >= limit):
        raise TruncationWindowError(
            f"{name} closed form is only valid for t < {limit}; pass allow_truncated=True to override"
        )


def _scatter_rate(cfg: SystemConfig) -> complex:
    # decay of the driven scatterer in the rotating frame
    return cfg.gamma2 / 2 - 1j * cfg.delta


# -- transforms -------------------------------------------------------------


def transforms(cfg: SystemConfig) -> dict[str, list[RationalTransform]]:
    """Leading-order transforms, each a list of RationalTransform pieces."""
    g1, g2, g3, d = cfg.gamma1, cfg.gamma2, cfg.gamma3, cfg.delta
    a = _scatter_rate(cfg)
    sp = parity_sign(cfg)
    r13 = math.sqrt(g1 * g3)
    return {
        "c1": [
            RationalTransform(1.0, (), (g1 / 2,)),
            RationalTransform(g1 / 2, (-(g2 - 1j * d),), (g1 / 2, g1 / 2, a), 0.5),
        ],
        "c2": [RationalTransform(-sp * math.sqrt(g1 * g2) / 2, (), (g1 / 2, a), 0.25)],
        "c3": [RationalTransform(-r13 / 2, (1j * d,), (g1 / 2, g3 / 2, a), 0.5)],
        "c3_free": [RationalTransform(-r13 / 2, (), (g1 / 2, g3 / 2), 0.5)],
        "c3_scatter": [RationalTransform(g2 * r13 / 4, (), (g1 / 2, g3 / 2, a), 0.5)],
    }


def _series(pieces, rtol: float) -> StepSeries:
    out = StepSeries()
    for tf in pieces:
        out = out + tf.invert(rtol)
    return out


def amplitude_series(cfg: SystemConfig, name: str, confluence_rtol: float = CONFLUENCE_RTOL) -> StepSeries:
    """StepSeries for ``name`` in {c1, c2, c3, c3_free, c3_scatter}."""
    _check_positions(cfg)
    return _series(transforms(cfg)[name], confluence_rtol)


def b_series(cfg: SystemConfig, m: int, confluence_rtol: float = CONFLUENCE_RTOL) -> StepSeries:
    _check_positions(cfg)
    if abs(m) > cfg.mode_half_width:
        raise ValueError(f"mode offset {m} outside [-M, M]")
    g = coupling_matrix(cfg)[:, m + cfg.mode_half_width]
    return _series(_b_transforms(cfg, g[0], g[1], m), confluence_rtol)


def _b_transforms(cfg, g1m, g2m, m):
    g1, g2 = cfg.gamma1, cfg.gamma2
    wm = 1j * m * DELTA_C
    a = _scatter_rate(cfg)
    sp = parity_sign(cfg)
    pieces = []
    if g1m != 0:
        pieces.append(RationalTransform(-1j * g1m, (), (g1 / 2, wm)))
    if g2m != 0 and g2 > 0:
        gain = 1j * g2m * sp * math.sqrt(g1 * g2) / 2
        pieces.append(RationalTransform(gain, (), (g1 / 2, a, wm), 0.25))
    return pieces


# -- time-domain amplitudes -------------------------------------------------


def _evaluate(cfg, name, t, allow_truncated, window=None):
    _check_window(window or name, t, allow_truncated)
    return amplitude_series(cfg, name)(t)


def c1(cfg: SystemConfig, t, allow_truncated: bool = False):
    """Source-atom amplitude: free decay, then re-excitation from t = 1/2."""
    return _evaluate(cfg, "c1", t, allow_truncated)


def c2(cfg: SystemConfig, t, allow_truncated: bool = False):
    return _evaluate(cfg, "c2", t, allow_truncated)


def c3(cfg: SystemConfig, t, allow_truncated: bool = False):
    return _evaluate(cfg, "c3", t, allow_truncated)


def c3_free(cfg: SystemConfig, t, allow_truncated: bool = False):
    """Detector amplitude without the scatterer (gamma2 = 0)."""
    return _evaluate(cfg, "c3_free", t, allow_truncated, "c3")


def c3_scatter(cfg: SystemConfig, t, allow_truncated: bool = False):
    """Part of the detector amplitude attributable to scattering."""
    return _evaluate(cfg, "c3_scatter", t, allow_truncated, "c3")


def b_m(cfg: SystemConfig, m: int, t, allow_truncated: bool = False):
    _check_window("b", t, allow_truncated)
    return b_series(cfg, m)(t)


def b_modes(cfg: SystemConfig, t, allow_truncated: bool = False) -> np.ndarray:
    """All 2M+1 mode amplitudes at the times ``t``; shape (len(t), 2M+1)."""
    _check_positions(cfg)
    _check_window("b", t, allow_truncated)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = coupling_matrix(cfg)
    out = np.empty((t.size, g.shape[1]), dtype=complex)
    for col, m in enumerate(cfg.mode_offsets):
        series = _series(_b_transforms(cfg, g[0, col], g[1, col], int(m)), CONFLUENCE_RTOL)
        out[:, col] = series(t) if series.terms else 0.0
    return out


def analytic_trace(cfg: SystemConfig, times, with_modes: bool = False,
                   allow_truncated: bool = False) -> AmplitudeTrace:
    times = np.asarray(times, dtype=float)
    c = np.array([
        c1(cfg, times, allow_truncated),
        c2(cfg, times, allow_truncated),
        c3(cfg, times, allow_truncated),
    ])
    b = b_modes(cfg, times, allow_truncated) if with_modes else None
    return AmplitudeTrace(times, c, b, provenance="analytic")


# -- mode-sum and transform checks -----------------------------------------


def f11_direct(cfg: SystemConfig, s: complex) -> complex:
    """Truncated mode sum f_11(s) = sum_m g_1m^2 / (i s / D_c - m) / D_c^2."""
    g1m = coupling_matrix(cfg)[0]
    m = cfg.mode_offsets
    return complex(np.sum(g1m**2 / (1j * s / DELTA_C - m)) / DELTA_C**2)


def f11_closed(cfg: SystemConfig, s: complex) -> complex:
    """Infinite-mode limit of f_11 for the source atom at z = 1/4."""
    x = math.pi * complex(s) / (4 * DELTA_C)
    if x.real < 0:
        x = -x  # the ratio below is odd in x
        sign = -1
    else:
        sign = 1
    # sinh(3x) / (cosh(x) cosh(2x)) written to avoid overflow for large Re(x)
    e2, e4, e6 = np.exp(-2 * x), np.exp(-4 * x), np.exp(-6 * x)
    ratio = 2 * (1 - e6) / ((1 + e2) * (1 + e4))
    return complex(-1j * cfg.gamma1 / (4 * DELTA_C) * sign * ratio)


def f11_sum_check(cfg: SystemConfig, s: complex) -> tuple[complex, complex]:
    if complex(s).real <= 0:
        raise ValueError("f11 check requires Re(s) > 0")
    return f11_direct(cfg, s), f11_closed(cfg, s)


@dataclass(frozen=True)
class LaplaceLeadingTerms:
    s: complex
    c1: complex
    c2: complex
    c3: complex


def laplace_leading_terms(cfg: SystemConfig, s: complex, pole_tol: float = 1e-9) -> LaplaceLeadingTerms:
    if complex(s).real <= 0:
        raise ValueError("transforms are evaluated for Re(s) > 0")
    values = {}
    for name in ("c1", "c2", "c3"):
        total = 0j
        for tf in transforms(cfg)[name]:
            if tf.pole_distance(s) < pole_tol:
                raise ValueError(f"s = {s} is within {pole_tol} of a pole of {name}~(s)")
            total += complex(tf(s))
        values[name] = total
    return LaplaceLeadingTerms(complex(s), **values)
