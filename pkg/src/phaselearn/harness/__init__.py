from phaselearn.harness.config import ConfigError, ExperimentSpec, load_spec
from phaselearn.harness.runner import (
    ExponentFit,
    Row,
    csv_text,
    find_threshold,
    fit_exponent,
    run_trials,
    scaling_study,
)

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "ExponentFit",
    "Row",
    "csv_text",
    "find_threshold",
    "fit_exponent",
    "load_spec",
    "run_trials",
    "scaling_study",
]
