"""System parameters for the three-atom cavity model.

Natural units are fixed throughout the package: c = L = hbar = eps0 = V = 1.
Times are in units of L/c, rates and detunings in units of c/L, and the
cavity mode spacing is ``DELTA_C = pi``.

Atoms sit at fractional positions z_j of the cavity and couple to the
standing-wave mode m (frequency ``(m0 + m) * pi``) with strength

    g_jm = Omega_j * sin((m0 + m) * pi * z_j),    Omega_j = sqrt(gamma_j).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

DELTA_C = math.pi


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class SystemConfig:
    gamma1: float = 4.0
    gamma2: float = 64.0
    gamma3: float = 1024.0
    delta: float = 0.0
    f: float = 1e-3
    m0: int = 1_000_000
    mode_half_width: int = 2048
    z1: float = 0.25
    z2: float = 0.5
    z3: float = 0.75

    @property
    def delta_c(self) -> float:
        return DELTA_C

    @property
    def M(self) -> int:
        return self.mode_half_width

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3)

    @property
    def positions(self) -> tuple[float, float, float]:
        return (self.z1, self.z2, self.z3)

    @property
    def omega1(self) -> float:
        """Source-atom frequency, resonant with mode m = 0."""
        return self.m0 * DELTA_C

    @property
    def mode_offsets(self) -> np.ndarray:
        return np.arange(-self.mode_half_width, self.mode_half_width + 1)

    @property
    def default_positions(self) -> bool:
        return (self.z1, self.z2, self.z3) == (0.25, 0.5, 0.75)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged, or raise ConfigError listing every violation."""
    problems = []
    for name in ("gamma1", "gamma2", "gamma3"):
        value = getattr(cfg, name)
        if not math.isfinite(value) or value < 0:
            problems.append(f"{name} negative or non-finite")
    for name in ("delta", "f"):
        if not math.isfinite(getattr(cfg, name)):
            problems.append(f"{name} non-finite")
    if not 0 <= cfg.f <= 1:
        problems.append("f outside [0, 1]")
    if int(cfg.m0) != cfg.m0 or int(cfg.mode_half_width) != cfg.mode_half_width:
        problems.append("m0 and mode_half_width must be integers")
    if cfg.m0 % 4 != 0:
        problems.append("m0 not divisible by 4")
    if cfg.mode_half_width < 1:
        problems.append("mode_half_width M < 1")
    if cfg.mode_half_width >= cfg.m0:
        problems.append("M >= m0 (non-positive mode frequencies)")
    z = cfg.positions
    if not all(0 < zj < 1 for zj in z):
        problems.append("positions outside (0, 1)")
    if not z[0] < z[1] < z[2]:
        problems.append("positions unordered")
    if problems:
        raise ConfigError(problems)
    return cfg


def omega_from_gamma(gamma: float) -> float:
    """Vacuum Rabi constant from a decay rate: gamma = pi |Omega|^2 / DELTA_C."""
    if gamma < 0:
        raise ValueError("decay rate must be non-negative")
    return math.sqrt(gamma * DELTA_C / math.pi)


def gamma_from_omega(omega: float) -> float:
    return math.pi * abs(omega) ** 2 / DELTA_C


def _sin_pi_multiple(n: int, z: Fraction) -> float:
    # sin(pi * n * z) with the argument reduced exactly, so nodes are exact zeros
    # and antinodes exact +-1 even for n ~ 1e6.
    r = (n * z) % 2
    sign = 1.0
    if r >= 1:
        r -= 1
        sign = -1.0
    if r > Fraction(1, 2):
        r = 1 - r
    if r == 0:
        return 0.0
    if r == Fraction(1, 2):
        return sign
    return sign * math.sin(math.pi * float(r))


def mode_profile(cfg: SystemConfig, z: float, m=None) -> np.ndarray:
    """sin((m0 + m) pi z) for the given mode offsets (all modes by default)."""
    offsets = cfg.mode_offsets if m is None else np.atleast_1d(m)
    zf = Fraction(z)
    return np.array([_sin_pi_multiple(cfg.m0 + int(k), zf) for k in offsets])


def coupling_constant(cfg: SystemConfig, j: int, m: int) -> float:
    if j not in (1, 2, 3):
        raise ValueError("atom index must be 1, 2 or 3")
    if abs(m) > cfg.mode_half_width:
        raise ValueError(f"mode offset {m} outside [-M, M]")
    omega = omega_from_gamma(cfg.gammas[j - 1])
    return omega * _sin_pi_multiple(cfg.m0 + m, Fraction(cfg.positions[j - 1]))


def coupling_matrix(cfg: SystemConfig) -> np.ndarray:
    """Array of shape (3, 2M+1) holding g_jm for every simulated mode."""
    rows = [omega_from_gamma(g) * mode_profile(cfg, z) for g, z in zip(cfg.gammas, cfg.positions)]
    return np.array(rows)


def decay_rate_from_modes(cfg: SystemConfig, j: int) -> float:
    """Golden-rule decay rate 2 pi <g_jm^2> / DELTA_C over the truncated grid.

    Converges to gamma_j with an O(1/M) error; for the default positions the
    mode-averaged sin^2 is exactly 1/2 over every full period of the pattern.
    """
    g = coupling_matrix(cfg)[j - 1]
    return 2 * math.pi * float(np.mean(g**2)) / DELTA_C


def parity_sign(cfg: SystemConfig) -> int:
    """(-1)**(m0/4): relative sign of g_1m g_2m for the default atom positions."""
    return -1 if (cfg.m0 // 4) % 2 else 1


_INT_KEYS = {"m0", "mode_half_width"}
_ALIASES = {"M": "mode_half_width"}


def parse_config(text: str, base: SystemConfig | None = None) -> SystemConfig:
    """Parse ``key = value`` lines (``#`` comments) into a validated config."""
    fields = {f.name for f in dataclasses.fields(SystemConfig)}
    values = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in fields:
            problems.append(f"line {lineno}: unknown key '{key}'")
            continue
        try:
            if key in _INT_KEYS:
                number = float(value)
                if number != int(number):
                    raise ValueError
                values[key] = int(number)
            else:
                values[key] = float(value)
        except ValueError:
            problems.append(f"line {lineno}: bad value for {key}: {value!r}")
    if problems:
        raise ConfigError(problems)
    cfg = dataclasses.replace(base or SystemConfig(), **values)
    return validate_config(cfg)


def load_config(path) -> SystemConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: SystemConfig) -> str:
    return "".join(f"{k} = {v!r}\n" for k, v in cfg.as_dict().items())
