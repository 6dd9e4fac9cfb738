"""Experiment harness and command line interface."""

from .config import ExperimentConfig
from .harness import RunResult, negative_control, planted_coset, planted_report, run

__all__ = ["ExperimentConfig", "RunResult", "negative_control", "planted_coset", "planted_report", "run"]
