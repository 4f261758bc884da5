"""Time-splitting Fourier spectral solvers for the nonlinear Schrodinger equation

    i psi_t = -psi_xx + V(x) psi + beta |psi|^(2 sigma) psi

on a periodic interval, with convergence-study tooling.
"""
from .analysis import ErrorSample, RcoTable, error_norms, estimate_order, rco_diagnostics
from .errors import CacheError, ConfigError, DivergenceError, InvalidInputError
from .integrators import (
    SCHEMES, SchemeRun, Trajectory, evolve, ewi_step, free_flow, lie_step, nonlinear_flow,
    strang_step,
)
from .physics import InitialData, Nonlinearity, Potential, sample_initial, sample_potential
from .spectral import (
    Grid, SampledField, SpectralField, embed, forward_transform, inverse_transform, project,
    sobolev_norm, synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "CacheError", "ConfigError", "DivergenceError", "ErrorSample", "Grid", "InitialData",
    "InvalidInputError", "Nonlinearity", "Potential", "RcoTable", "SCHEMES", "SampledField",
    "SchemeRun", "SpectralField", "Trajectory", "embed", "error_norms", "estimate_order",
    "evolve", "ewi_step", "forward_transform", "free_flow", "inverse_transform", "lie_step",
    "nonlinear_flow", "project", "rco_diagnostics", "sample_initial", "sample_potential",
    "sobolev_norm", "strang_step", "synthesize",
]
