"""Local-projection inference for AR(1) impulse responses with bootstrap intervals."""

from .bootstrap import (
    BootstrapDraws,
    BootstrapSpec,
    Scheme,
    bootstrap_roots,
    centered_residuals,
    critical_value_sym,
    quantile_pair_equal_tail,
)
from .dgp import Series, ShockDesign, generate_shocks, paper_design, simulate_ar1
from .harness import CoverageReport, StudyConfig, run_replication, run_study
from .intervals import ConfidenceInterval, IntervalMethod, build_interval, covers
from .lp import LpFit, SeKind, fit_lp, impulse_response, rho_hat_full, root
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "BootstrapDraws", "BootstrapSpec", "ConfidenceInterval", "CoverageReport", "IntervalMethod",
    "LpFit", "RngStream", "Scheme", "SeKind", "Series", "ShockDesign", "StudyConfig",
    "bootstrap_roots", "build_interval", "centered_residuals", "covers", "critical_value_sym",
    "fit_lp", "generate_shocks", "impulse_response", "paper_design", "quantile_pair_equal_tail",
    "rho_hat_full", "root", "run_replication", "run_study", "simulate_ar1",
]
