"""Reliability-gated siting screen for large flexible loads."""

from ._gridsiter import (
    ConfigError,
    EnvelopeError,
    __version__,
    candidates,
    check_ramp,
    dc_flows,
    envelope,
    ptdf,
    run,
    spearman,
    sweep,
    time_savings,
    time_savings_range,
    topsis,
)

__all__ = [
    "ConfigError",
    "EnvelopeError",
    "__version__",
    "candidates",
    "check_ramp",
    "dc_flows",
    "envelope",
    "ptdf",
    "run",
    "spearman",
    "sweep",
    "time_savings",
    "time_savings_range",
    "topsis",
]
