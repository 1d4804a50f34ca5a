"""Periodic steady-state Age of Information for a time-varying priority queue."""

from ._core import (
    Config,
    ConfigError,
    InsufficientDataError,
    NumericalError,
    StateSpace,
    floquet,
    load_config,
    parse_config,
    simulate,
    solve,
    validate,
)

__all__ = [
    "Config",
    "ConfigError",
    "InsufficientDataError",
    "NumericalError",
    "StateSpace",
    "floquet",
    "load_config",
    "parse_config",
    "simulate",
    "solve",
    "validate",
]
