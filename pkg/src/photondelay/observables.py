"""Field-level observables and the delay measures built on them.

The quantum analytic signal at the detector position z = 3/4 (detector
atom removed) is

    E(t) = -i Theta(t - 1/2) sqrt(w1 g1 / 2) [e1 - i g2/(2 d - i(g1 - g2)) (e1 - e2)]

with e1 = exp(-g1 (t-1/2)/2), e2 = exp(-(g2/2 - i d)(t-1/2)); its squared
modulus is the normally ordered intensity. Weak scattering is modelled by
scaling the scattering part by f, both for E and for the detector amplitude
(c3 = c3_free + f c3_scatter). The overall normalisation of that
superposition cancels in every centre-of-gravity ratio and is set to one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import analytic
from .classical import ClassicalMedium, group_delay, phase_delay
from .cog import arrival_time, arrival_time_series
from .laplace import RationalTransform, StepSeries, cross_moment
from .params import SystemConfig, mode_profile

DETECTOR_Z = 0.75


def field_series(cfg: SystemConfig, with_scatterer: bool = True, scattering_scale: float = 1.0) -> StepSeries:
    g1, g2, d = cfg.gamma1, cfg.gamma2, cfg.delta
    amp = math.sqrt(cfg.omega1 * g1 / 2)
    series = RationalTransform(-1j * amp, (), (g1 / 2,), 0.5).invert()
    if with_scatterer and g2 > 0 and scattering_scale != 0:
        block = RationalTransform(1j * amp * g2 / 2, (), (g1 / 2, g2 / 2 - 1j * d), 0.5).invert()
        series = series + block.scaled(scattering_scale)
    return series


def field_envelope(cfg: SystemConfig, t, with_scatterer: bool = True, scattering_scale: float = 1.0,
                   allow_truncated: bool = False):
    """Quantum analytic signal at z = 3/4 (natural units, carrier removed)."""
    analytic._check_positions(cfg)
    analytic._check_window("field", t, allow_truncated)
    return field_series(cfg, with_scatterer, scattering_scale)(t)


def intensity_expectation(cfg: SystemConfig, t, with_scatterer: bool = True, allow_truncated: bool = False):
    return np.abs(field_envelope(cfg, t, with_scatterer, allow_truncated=allow_truncated)) ** 2


def mode_field(cfg: SystemConfig, z: float, b) -> np.ndarray:
    """sqrt(2 w1) sum_m b_m sin((m0+m) pi z) for b of shape (..., 2M+1)."""
    return math.sqrt(2 * cfg.omega1) * (np.asarray(b) @ mode_profile(cfg, z))


def intensity_from_modes(cfg: SystemConfig, z: float, b) -> np.ndarray:
    return np.abs(mode_field(cfg, z, b)) ** 2


# -- delays -----------------------------------------------------------------


def _detector_series(cfg: SystemConfig, scale: float) -> StepSeries:
    free = analytic.amplitude_series(cfg, "c3_free")
    if scale == 0 or cfg.gamma2 == 0:
        return free
    return free + analytic.amplitude_series(cfg, "c3_scatter").scaled(scale)


def _check_weak(cfg: SystemConfig) -> None:
    if cfg.f > 0.1:
        raise ValueError("weak-scattering delays need f <= 0.1")


def _quad_arrival(series: StepSeries) -> float:
    rates = [abs(t.rate) for t in series.terms] or [1.0]
    return arrival_time(lambda t: abs(series(t)) ** 2, series.turn_on, scale=1.0 / max(rates))


def _cog_difference(with_series: StepSeries, without: StepSeries, method: str) -> float:
    if method == "exact":
        return arrival_time_series(with_series) - arrival_time_series(without)
    if method == "quad":
        return _quad_arrival(with_series) - _quad_arrival(without)
    raise ValueError(f"unknown method {method!r}")


def delay_c3(cfg: SystemConfig, method: str = "exact") -> float:
    """COG delay of |c3_free + f c3_scatter|^2 relative to |c3_free|^2.

    ``exact`` integrates the exponential moments in closed form (tails
    included analytically); ``quad`` uses adaptive quadrature.
    """
    _check_weak(cfg)
    if cfg.f == 0 or cfg.gamma2 == 0:
        return 0.0
    return _cog_difference(_detector_series(cfg, cfg.f), _detector_series(cfg, 0), method)


def delay_c3_first_order(cfg: SystemConfig) -> float:
    """Linearised delay 2f [<t Re(c0 cs*)>/<|c0|^2> - <t|c0|^2><Re(c0 cs*)>/<|c0|^2>^2]."""
    _check_weak(cfg)
    if cfg.f == 0 or cfg.gamma2 == 0:
        return 0.0
    c0 = analytic.amplitude_series(cfg, "c3_free")
    cs = analytic.amplitude_series(cfg, "c3_scatter")
    n0 = cross_moment(c0, c0, 0).real
    n1 = cross_moment(c0, c0, 1).real
    x0 = cross_moment(c0, cs, 0).real
    x1 = cross_moment(c0, cs, 1).real
    return 2 * cfg.f * (x1 / n0 - n1 * x0 / n0**2)


def delay_c3_closed(cfg: SystemConfig) -> float:
    """Limit g3 -> inf then g1 -> 0: 4 f g2 (4 d^2 - g2^2) / (4 d^2 + g2^2)^2."""
    g2, d = cfg.gamma2, cfg.delta
    if g2 == 0:
        return 0.0
    return 4 * cfg.f * g2 * (4 * d**2 - g2**2) / (4 * d**2 + g2**2) ** 2


def delay_field(cfg: SystemConfig, method: str = "exact") -> float:
    """COG delay of the normally ordered intensity at z = 3/4, f-scaled scattering."""
    _check_weak(cfg)
    if cfg.f == 0 or cfg.gamma2 == 0:
        return 0.0
    return _cog_difference(field_series(cfg, True, cfg.f), field_series(cfg, False), method)


@dataclass
class DelayReport:
    delta: float
    dt_phase: float = float("nan")
    dt_group: float = float("nan")
    dt_c3_closed: float = float("nan")
    dt_c3_quad: float = float("nan")
    dt_field_quad: float = float("nan")
    f_used: float = float("nan")
    gamma_triplet: tuple = ()
    status: str = "ok"

    CSV_COLUMNS = ("delta", "dt_phase", "dt_group", "dt_c3_closed", "dt_c3_quad", "dt_field_quad", "status")

    def csv_row(self) -> list:
        return [getattr(self, k) for k in self.CSV_COLUMNS]


def classical_medium(cfg: SystemConfig) -> ClassicalMedium:
    """Lorentz medium matching the scatterer: gamma -> gamma2, omega0 -> source frequency."""
    return ClassicalMedium(f=cfg.f, gamma=cfg.gamma2, omega0=cfg.omega1)


def delay_report(cfg: SystemConfig, method: str = "exact") -> DelayReport:
    rep = DelayReport(cfg.delta, f_used=cfg.f, gamma_triplet=cfg.gammas)
    errors = []
    try:
        med = classical_medium(cfg)
        rep.dt_phase = float(phase_delay(med, cfg.delta))
        rep.dt_group = float(group_delay(med, cfg.delta))
    except ValueError as exc:
        errors.append(f"classical: {exc}")
    rep.dt_c3_closed = delay_c3_closed(cfg)
    for name, fn in (("dt_c3_quad", delay_c3), ("dt_field_quad", delay_field)):
        try:
            setattr(rep, name, fn(cfg, method))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            errors.append(f"{name}: {exc}")
    if errors:
        rep.status = "error: " + " | ".join(errors)
    return rep


def _report_worker(args):
    cfg, method = args
    return delay_report(cfg, method)


def default_jobs() -> int:
    return max(1, int(os.environ.get("PDL_DEFAULT_JOBS", "1")))


def sweep_detuning(cfg: SystemConfig, delta_grid, jobs: int | None = None, method: str = "exact") -> list[DelayReport]:
    """One DelayReport per detuning, in grid order; per-point failures are recorded, not raised."""
    grid = [float(d) for d in np.asarray(delta_grid, dtype=float)]
    if not all(math.isfinite(d) for d in grid):
        raise ValueError("detuning grid must be finite")
    tasks = [(cfg.replace(delta=d), method) for d in grid]
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(tasks) < 2:
        return [_report_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_report_worker, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def report_dict(rep: DelayReport) -> dict:
    return asdict(rep)
