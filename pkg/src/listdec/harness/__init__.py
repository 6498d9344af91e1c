"""Experiment harness for listdec."""

from .core import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentRecord,
    ExperimentRunner,
    load_config,
    run_chain_trial,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentRecord",
    "ExperimentRunner",
    "load_config",
    "run_chain_trial",
]
