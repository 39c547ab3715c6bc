"""Brute-force integration of the single-excitation amplitude equations.

Rotating frame at the source-atom frequency:

    dc_j/dt = -i (w_j c_j + sum_m g_jm b_m),       w = (0, -delta, 0)
    db_m/dt = -i (m D_c b_m + sum_j conj(g_jm) c_j)

on the truncated grid m in [-M, M]. This is the independent oracle for the
closed forms in ``analytic``; it supports arbitrary atom positions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .params import DELTA_C, SystemConfig, coupling_matrix
from .trace import AmplitudeTrace

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached:.6g})")
        self.t_reached = t_reached


@dataclass
class QuantumState:
    c1: complex
    c2: complex
    c3: complex
    b: np.ndarray
    t: float = 0.0

    @classmethod
    def from_vector(cls, y: np.ndarray, t: float = 0.0) -> "QuantumState":
        return cls(complex(y[0]), complex(y[1]), complex(y[2]), np.array(y[3:], dtype=complex), t)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.c1, self.c2, self.c3], self.b]).astype(complex)

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.to_vector()) ** 2))


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    t_end: float = 1.0
    method: str = "DOP853"  # or "RK4" (fixed step) or "eigh" (exact propagator)
    rk4_step: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.method not in ("DOP853", "RK45", "RK4", "eigh"):
            raise ValueError(f"unknown method {self.method!r}")


def initial_state(cfg: SystemConfig) -> QuantumState:
    return QuantumState(1.0 + 0j, 0j, 0j, np.zeros(2 * cfg.mode_half_width + 1, dtype=complex), 0.0)


class _Generator:
    """Holds the couplings and frame frequencies for repeated RHS calls."""

    def __init__(self, cfg: SystemConfig):
        self.g = coupling_matrix(cfg).astype(complex)
        self.gh = self.g.conj().T
        self.w_atoms = np.array([0.0, -cfg.delta, 0.0])
        self.w_modes = cfg.mode_offsets * DELTA_C

    def __call__(self, t, y):
        c, b = y[:3], y[3:]
        out = np.empty_like(y)
        out[:3] = -1j * (self.w_atoms * c + self.g @ b)
        out[3:] = -1j * (self.w_modes * b + self.gh @ c)
        return out

    def hamiltonian(self) -> np.ndarray:
        n = 3 + self.w_modes.size
        H = np.zeros((n, n), dtype=complex)
        H[:3, :3] = np.diag(self.w_atoms)
        H[3:, 3:] = np.diag(self.w_modes)
        H[:3, 3:] = self.g
        H[3:, :3] = self.gh
        return H


def rhs(cfg: SystemConfig, state: QuantumState) -> QuantumState:
    dy = _Generator(cfg)(state.t, state.to_vector())
    return QuantumState.from_vector(dy, state.t)


def _rk4(fun, y0, times, t_end, h):
    n_steps = int(np.ceil(t_end / h))
    h = t_end / n_steps
    out = np.empty((len(times), y0.size), dtype=complex)
    k = 0
    y, t = y0.copy(), 0.0
    grid = np.linspace(0.0, t_end, n_steps + 1)
    for i in range(n_steps + 1):
        t = grid[i]
        while k < len(times) and times[k] <= t + 1e-12 * h:
            if abs(times[k] - t) > 1e-9 * h:
                raise ValueError("RK4 sample times must lie on the step grid")
            out[k] = y
            k += 1
        if i == n_steps:
            break
        k1 = fun(t, y)
        k2 = fun(t + h / 2, y + h / 2 * k1)
        k3 = fun(t + h / 2, y + h / 2 * k2)
        k4 = fun(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("RK4 produced non-finite amplitudes", t + h)
    return out


def evolve(cfg: SystemConfig, settings: IntegratorSettings, sample_times) -> AmplitudeTrace:
    """Integrate from the initial state and sample at ``sample_times``."""
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("sample_times must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0) or times[0] < 0 or times[-1] > settings.t_end:
        raise ValueError("sample_times must be increasing and within [0, t_end]")

    gen = _Generator(cfg)
    y0 = initial_state(cfg).to_vector()
    if settings.method == "eigh":
        energies, vecs = np.linalg.eigh(gen.hamiltonian())
        amp0 = vecs.conj().T @ y0
        Y = (vecs @ (amp0[:, None] * np.exp(-1j * energies[:, None] * times[None, :]))).T
    elif settings.method == "RK4":
        h = settings.rk4_step or 0.1 / (cfg.mode_half_width * DELTA_C)
        Y = _rk4(gen, y0, times, settings.t_end, h)
    else:
        sol = solve_ivp(
            gen, (0.0, settings.t_end), y0, method=settings.method, t_eval=times,
            rtol=settings.rel_tol, atol=settings.abs_tol, max_step=settings.max_step,
        )
        if sol.status != 0:
            reached = float(sol.t[-1]) if sol.t.size else 0.0
            raise IntegrationError(sol.message, reached)
        log.debug("%s: %d RHS evaluations", settings.method, sol.nfev)
        Y = sol.y.T
    trace = AmplitudeTrace(times, Y[:, :3].T, Y[:, 3:], provenance="ode")
    trace.norm_drift = float(np.max(np.abs(trace.norm2 - 1.0)))
    trace.info = {"method": settings.method, "M": cfg.mode_half_width}
    return trace
