"""Deterministic discrete-event simulator for MANET routing protocols."""

from .runner import run_scenario, run_sweep
from .schemas import MetricsReport, ScenarioConfig, SweepSpec

__version__ = "0.1.0"

__all__ = ["run_scenario", "run_sweep", "MetricsReport", "ScenarioConfig", "SweepSpec", "__version__"]
