"""Explosive planar SDE: trajectories, flow scans and Monte Carlo experiments."""

from ._core import (
    Cone,
    Model,
    bisect,
    brownian_sample,
    drift_binomial,
    drift_polar,
    epsilon_of,
    flowcheck,
    load_config,
    longrun,
    montecarlo,
    scan,
    schema_version,
    simulate,
    sine_constants,
)

__all__ = [
    "Cone",
    "Model",
    "bisect",
    "brownian_sample",
    "drift_binomial",
    "drift_polar",
    "epsilon_of",
    "flowcheck",
    "load_config",
    "longrun",
    "montecarlo",
    "scan",
    "schema_version",
    "simulate",
    "sine_constants",
]
