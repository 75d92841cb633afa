"""Hammerstein self-interference canceller: models, optimizers and experiment harness."""

from ._sic import (
    ConfigError,
    HammersteinModel,
    NumericalAbort,
    SingularMatrixError,
    UsageError,
    cg_solve,
    cost_cg,
    cost_grad,
    cost_mnm,
    format_config,
    gen_amplitude_probe,
    gen_ofdm,
    hermitian_solve,
    lr_schedule,
    nmse_db,
    pa_apply,
    planned_updates,
    relative_cost,
    run_experiment,
)

__all__ = [
    "ConfigError",
    "HammersteinModel",
    "NumericalAbort",
    "SingularMatrixError",
    "UsageError",
    "cg_solve",
    "cost_cg",
    "cost_grad",
    "cost_mnm",
    "format_config",
    "gen_amplitude_probe",
    "gen_ofdm",
    "hermitian_solve",
    "lr_schedule",
    "nmse_db",
    "pa_apply",
    "planned_updates",
    "relative_cost",
    "run_experiment",
]
