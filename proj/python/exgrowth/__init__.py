"""Exchange-driven growth solvers: mean-field ODE, particle simulator, finite Gibbs chain."""

from ._core import (
    ConfigError,
    EdgError,
    Kernel,
    Perturbation,
    RangeError,
    SizeError,
    SupercriticalError,
    WeightTable,
    d_ex,
    edf_total,
    equilibrium,
    gibbs,
    integrate,
    kernel_dbc_residual,
    optimal_oneway,
    r_net,
    run_command,
    simulate,
    w1,
    weights,
)

__all__ = [
    "ConfigError",
    "EdgError",
    "Kernel",
    "Perturbation",
    "RangeError",
    "SizeError",
    "SupercriticalError",
    "WeightTable",
    "d_ex",
    "edf_total",
    "equilibrium",
    "gibbs",
    "integrate",
    "kernel_dbc_residual",
    "optimal_oneway",
    "r_net",
    "run_command",
    "simulate",
    "w1",
    "weights",
]
