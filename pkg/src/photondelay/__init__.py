"""Single-photon emission, scattering and detection in a 1D multimode cavity.

Closed-form and brute-force amplitudes of a three-atom chain, the matching
classical Lorentz-medium response, and the phase, group and
centre-of-gravity delays built on them.
"""

from .params import ConfigError, SystemConfig, load_config, parse_config, validate_config

__all__ = ["ConfigError", "SystemConfig", "load_config", "parse_config", "validate_config"]
__version__ = "0.1.0"
