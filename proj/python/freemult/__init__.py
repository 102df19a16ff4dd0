"""Densities of free positive multiplicative Brownian motion and log-unimodality checks."""

from ._freemult import (
    CriterionReport,
    DensityCurve,
    FreemultError,
    GapCertificate,
    Measure,
    ModeReport,
    PickReport,
    SolutionCount,
    StrongCheck,
    counterexample,
    d_bound,
    density,
    density_curve,
    first_gap_certificate,
    is_log_unimodal,
    lambda_strong_check,
    mult_convolve,
    pick_inequality_check,
    run_command,
    run_scenario,
    theta_R,
    theta_sweep,
)

__all__ = [
    "CriterionReport",
    "DensityCurve",
    "FreemultError",
    "GapCertificate",
    "Measure",
    "ModeReport",
    "PickReport",
    "SolutionCount",
    "StrongCheck",
    "counterexample",
    "d_bound",
    "density",
    "density_curve",
    "first_gap_certificate",
    "is_log_unimodal",
    "lambda_strong_check",
    "mult_convolve",
    "pick_inequality_check",
    "run_command",
    "run_scenario",
    "theta_R",
    "theta_sweep",
]
