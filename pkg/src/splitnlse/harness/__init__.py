"""Experiment orchestration: configs, reference caches, sweeps, plots and the CLI."""
from .cache import CacheHeader, ReferenceCache, read_cache, write_cache
from .config import ExperimentConfig
from .plot import emit_plot
from .study import (
    CSV_HEADER, ConvergenceRecord, compute_reference, read_csv, run_convergence_study, write_csv,
)

__all__ = [
    "CSV_HEADER", "CacheHeader", "ConvergenceRecord", "ExperimentConfig", "ReferenceCache",
    "compute_reference", "emit_plot", "read_cache", "read_csv", "run_convergence_study",
    "write_cache", "write_csv",
]
