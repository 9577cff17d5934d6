"""Python bindings for the plurality consensus simulator."""

from ._core import (
    ConfigError,
    Simulation,
    Variant,
    config_fingerprint,
    load_balance_step,
    make_config,
    make_distribution,
    run_experiment,
    run_junta,
    run_majority,
    run_trial,
)

__all__ = [
    "ConfigError",
    "Simulation",
    "Variant",
    "config_fingerprint",
    "load_balance_step",
    "make_config",
    "make_distribution",
    "run_experiment",
    "run_junta",
    "run_majority",
    "run_trial",
]
