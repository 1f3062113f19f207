"""Renewable edge-site energy management toolkit.

Thin Python face over the C++ core: synthetic traces, LSTM forecasting,
x-means profile clustering, and the slotted multi-site control simulation.
"""

from _greenmesh import (  # noqa: F401
    CapacityError,
    ConfigError,
    MetricsLog,
    ParseError,
    SimConfig,
    ValidationError,
    battery_step,
    containers_needed,
    cost_j,
    forecast,
    parse_config,
    run_sim,
    synth_trace,
    train_forecaster,
    xmeans,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "MetricsLog",
    "ParseError",
    "SimConfig",
    "ValidationError",
    "battery_step",
    "containers_needed",
    "cost_j",
    "forecast",
    "parse_config",
    "run_sim",
    "synth_trace",
    "train_forecaster",
    "xmeans",
]
